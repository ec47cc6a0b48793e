//! Sample points: explicit lists or a seeded box.

/// 64-bit LCG: `s ← s·6364136223846793005 + 1442695040888963407` (wrapping);
/// a uniform draw is the top 53 bits of the new state over `2^53`.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Lcg {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    Points(Vec<Vec<f64>>),
    /// Coordinates drawn in index order, point by point.
    Box { lo: Vec<f64>, hi: Vec<f64>, count: usize, seed: u64 },
}

impl Sampling {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Sampling::Box { seed, .. } => Some(*seed),
            Sampling::Points(_) => None,
        }
    }

    /// The sample list. `seed` and `count` override the file; a point list
    /// ignores the seed and is truncated to `count`.
    pub fn points(&self, seed: Option<u64>, count: Option<usize>) -> Vec<Vec<f64>> {
        match self {
            Sampling::Points(p) => p.iter().take(count.unwrap_or(p.len())).cloned().collect(),
            Sampling::Box { lo, hi, count: c, seed: s } => {
                let mut rng = Lcg::new(seed.unwrap_or(*s));
                (0..count.unwrap_or(*c))
                    .map(|_| lo.iter().zip(hi).map(|(a, b)| rng.range(*a, *b)).collect())
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_first_draws() {
        let mut r = Lcg::new(0);
        assert_eq!(r.next_u64(), Lcg::INCREMENT);
        assert_eq!(r.next_u64(), Lcg::INCREMENT.wrapping_mul(Lcg::MULTIPLIER).wrapping_add(Lcg::INCREMENT));
        let u = Lcg::new(7).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn box_is_reproducible() {
        let s = Sampling::Box { lo: vec![-1.0, 0.0], hi: vec![1.0, 2.0], count: 5, seed: 3 };
        let a = s.points(None, None);
        assert_eq!(a, s.points(None, None));
        assert_eq!(a.len(), 5);
        assert_ne!(a, s.points(Some(4), None));
        assert!(a.iter().all(|p| (-1.0..1.0).contains(&p[0]) && (0.0..2.0).contains(&p[1])));
    }
}
