//! Built-in scenario text.

use lightfol_core::lightfn::flat_corollary_scenario;
use lightfol_core::{Error, VectorField};

pub const FOL45_CHECKS: [&str; 12] = [
    "lightlike",
    "levelset_n",
    "ltr",
    "rad_q",
    "screen_index",
    "second_fundamental",
    "kappa_n",
    "kappa_vanishes",
    "kappa_routes",
    "rummler",
    "killing",
    "sigma",
];

fn tuple(v: &VectorField) -> String {
    let parts: Vec<String> = v.comps.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// The flat lightlike-function scenario on `ℝⁿ_s` as a scenario file.
pub fn fol45(n: usize, s: usize) -> Result<String, Error> {
    let scn = flat_corollary_scenario(n, s)?;
    let diag: Vec<&str> = (0..n).map(|i| if i < s { "-1" } else { "1" }).collect();
    let seed: Vec<String> = scn.screen_seed.as_deref().unwrap_or_default().iter().map(tuple).collect();
    let boxes: Vec<&str> = vec!["(-1, 1)"; n];
    let mut out = String::new();
    out += &format!("# flat R^{n}_{s} with a linear lightlike function\n");
    out += &format!("[scenario]\nname = fol45_n{n}_s{s}\n\n");
    out += &format!("[manifold]\ndim = {n}\nindex = {s}\nmetric = diag({})\n\n", diag.join(", "));
    out += &format!("[foliation]\nlevel = {}\nradical = gradient\n", scn.f);
    if !seed.is_empty() {
        out += &format!("screen = {}\n", seed.join("; "));
    }
    out += &format!("\n[complement]\nfields = {}\n\n", tuple(&scn.v));
    out += &format!("[checks]\nrun = {}\n\n", FOL45_CHECKS.join(", "));
    out += &format!("[sampling]\nbox = {}\ncount = 8\nseed = 1\n", boxes.join("; "));
    Ok(out)
}
