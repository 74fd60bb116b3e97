//! CSV and JSON renderings of profiles, DtN results and vectors.

use serde::{Deserialize, Serialize};

use sectorial_core::dtn::DtNResult;
use sectorial_core::extension::ExtensionProfile;
use sectorial_core::C64;

/// Complex number as `{ "re": …, "im": … }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

pub fn cx_vec(x: &[C64]) -> Vec<Cx> {
    x.iter().map(|&z| z.into()).collect()
}

fn cx_vecs(xs: &[Vec<C64>]) -> Vec<Vec<Cx>> {
    xs.iter().map(|x| cx_vec(x)).collect()
}

/// Header of the profile CSV.
pub const PROFILE_HEADER: &str = "t,‖u‖,‖u−x‖,‖t^{1−2α}u′‖,residual";

pub fn profile_csv(p: &ExtensionProfile) -> String {
    let mut s = String::from(PROFILE_HEADER);
    s.push('\n');
    for r in p.rows() {
        s.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", r.t, r.norm_u, r.dist_x, r.norm_flux, r.residual));
    }
    s
}

#[derive(Serialize)]
struct ProfileRowJson {
    t: f64,
    norm_u: f64,
    dist_x: f64,
    norm_flux: f64,
    residual: f64,
}

#[derive(Serialize)]
struct ProfileVectors {
    x: Vec<Cx>,
    u: Vec<Vec<Cx>>,
    du: Vec<Vec<Cx>>,
    flux: Vec<Vec<Cx>>,
}

#[derive(Serialize)]
struct ProfileJson {
    alpha: f64,
    method: &'static str,
    n: usize,
    rows: Vec<ProfileRowJson>,
    max_residual: f64,
    sup_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vectors: Option<ProfileVectors>,
}

/// Non-finite numbers appear as `null`.
pub fn profile_json(p: &ExtensionProfile, full_vectors: bool) -> String {
    let doc = ProfileJson {
        alpha: p.alpha.re(),
        method: p.method.tag(),
        n: p.x.len(),
        rows: p
            .rows()
            .into_iter()
            .map(|r| ProfileRowJson { t: r.t, norm_u: r.norm_u, dist_x: r.dist_x, norm_flux: r.norm_flux, residual: r.residual })
            .collect(),
        max_residual: p.max_residual(),
        sup_ratio: p.sup_ratio,
        vectors: full_vectors.then(|| ProfileVectors {
            x: cx_vec(&p.x),
            u: cx_vecs(&p.u_values),
            du: cx_vecs(&p.du_values),
            flux: cx_vecs(&p.flux_values),
        }),
    };
    to_json(&doc)
}

#[derive(Serialize)]
struct DtnJson<'a> {
    alpha: f64,
    n: usize,
    method: &'a str,
    rel_error: f64,
    observed_order: f64,
    expected_order: f64,
    fit_residual: f64,
    extrapolation_order: f64,
    t_schedule: &'a [f64],
    extrapolated_limit: Vec<Cx>,
    reference: Vec<Cx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    neumann_samples: Option<Vec<Vec<Cx>>>,
}

pub fn dtn_json(r: &DtNResult, method: &str, full_vectors: bool) -> String {
    let doc = DtnJson {
        alpha: r.alpha.re(),
        n: r.reference.len(),
        method,
        rel_error: r.rel_error,
        observed_order: r.observed_order,
        expected_order: r.expected_order(),
        fit_residual: r.fit_residual,
        extrapolation_order: r.extrapolation_order,
        t_schedule: &r.t_schedule,
        extrapolated_limit: cx_vec(&r.extrapolated_limit),
        reference: cx_vec(&r.reference),
        neumann_samples: full_vectors.then(|| cx_vecs(&r.neumann_samples)),
    };
    to_json(&doc)
}

/// `alpha,rel_error,observed_order,n,method` as a single line without header.
pub fn dtn_csv_line(r: &DtNResult, method: &str) -> String {
    format!("{:e},{:e},{:e},{},{}\n", r.alpha.re(), r.rel_error, r.observed_order, r.reference.len(), method)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_json_shape() {
        let s = serde_json::to_string(&Cx::from(C64::new(1.5, -2.0))).unwrap();
        assert_eq!(s, r#"{"re":1.5,"im":-2.0}"#);
    }

    #[test]
    fn header_is_literal() {
        assert_eq!(PROFILE_HEADER.split(',').count(), 5);
        assert!(PROFILE_HEADER.starts_with("t,"));
    }
}
