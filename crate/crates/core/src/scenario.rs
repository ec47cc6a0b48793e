//! A chart, a foliation and a complement, ready to be sampled.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::foliation::{Foliation, FoliationPlan, FoliationSpec};
use crate::forms::Convention;
use crate::geometry::{check_signature, Metric, MetricAt, MetricField, VectorField};
use crate::transversal::FrameBundle;
use crate::warped::WarpedMetric;

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMetric {
    Field(MetricField),
    Warped(WarpedMetric),
}

impl Metric for AnyMetric {
    fn dim(&self) -> usize {
        match self {
            AnyMetric::Field(m) => m.dim(),
            AnyMetric::Warped(m) => m.dim(),
        }
    }
    fn declared_index(&self) -> Option<usize> {
        match self {
            AnyMetric::Field(m) => m.declared_index(),
            AnyMetric::Warped(m) => m.declared_index(),
        }
    }
    fn matrix_with(&self, x: &[crate::Jet]) -> Result<crate::linalg::JetMat> {
        match self {
            AnyMetric::Field(m) => m.matrix_with(x),
            AnyMetric::Warped(m) => m.matrix_with(x),
        }
    }
}

impl From<MetricField> for AnyMetric {
    fn from(m: MetricField) -> Self {
        AnyMetric::Field(m)
    }
}

impl From<WarpedMetric> for AnyMetric {
    fn from(m: WarpedMetric) -> Self {
        AnyMetric::Warped(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub metric: AnyMetric,
    pub foliation: Foliation,
    pub complement: Vec<VectorField>,
    pub convention: Convention,
}

impl Scenario {
    pub fn new(metric: impl Into<AnyMetric>, spec: FoliationSpec, complement: Vec<VectorField>) -> Scenario {
        Scenario { metric: metric.into(), foliation: Foliation::new(spec), complement, convention: Convention::UnitShuffle }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Frame bundle at `p`, replaying `plan` when given.
    pub fn bundle_at(&self, p: &[f64], plan: Option<&FoliationPlan>) -> Result<(FrameBundle, FoliationPlan)> {
        if p.len() != self.dim() {
            return Err(Error::Invalid(alloc::format!("point has {} coordinates, chart has {}", p.len(), self.dim())));
        }
        check_signature(&self.metric, p)?;
        let mat = MetricAt::new(&self.metric, p)?;
        let (frames, plan) = self.foliation.frames(&mat, plan)?;
        let complement = self.complement.iter().map(|v| v.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?;
        let bundle = FrameBundle::assemble(mat, frames, complement, self.convention)?;
        Ok((bundle, plan))
    }

    /// Bundles at every sample with the plan of the first one.
    pub fn bundles(&self, samples: &[Vec<f64>]) -> Result<Vec<FrameBundle>> {
        let mut plan: Option<FoliationPlan> = None;
        let mut out = Vec::with_capacity(samples.len());
        for p in samples {
            let (b, pl) = self.bundle_at(p, plan.as_ref())?;
            plan.get_or_insert(pl);
            out.push(b);
        }
        Ok(out)
    }
}
