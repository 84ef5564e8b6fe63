//! Within-class, between-class and mixture scatter matrices of a two-class
//! feature set, with the trace and determinant separability ratios.
//!
//! With class priors `P_c = n_c / N`, class means `μ_c` and global mean
//! `μ₀`:
//!
//! ```text
//! Sw = Σ_c P_c · (1/n_c) Σ_{x∈c} (x − μ_c)(x − μ_c)ᵀ
//! Sb = Σ_c P_c · (μ_c − μ₀)(μ_c − μ₀)ᵀ
//! Sm = Sb + Sw
//! J1 = tr(Sm) / tr(Sw)      J2 = det(Sm) / det(Sw)
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::classify::class_order;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, JacobiOptions};

/// `Sw` counts as singular when its smallest eigenvalue is at most this
/// fraction of its largest.
pub const SINGULAR_RTOL: f64 = 1e-12;

fn rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterAnalysis {
    #[serde(serialize_with = "rows")]
    pub sw: DMatrix<f64>,
    #[serde(serialize_with = "rows")]
    pub sb: DMatrix<f64>,
    #[serde(serialize_with = "rows")]
    pub sm: DMatrix<f64>,
    pub trace_sw: f64,
    pub trace_sm: f64,
    pub det_sw: f64,
    pub det_sm: f64,
    /// `None` when `tr(Sw)` is zero.
    pub j1: Option<f64>,
    /// `None` when `Sw` is singular.
    pub j2: Option<f64>,
    pub flags: Vec<String>,
}

fn determinant(m: &DMatrix<f64>) -> Result<(f64, f64, f64)> {
    let eig = symmetric_eigen(m, JacobiOptions::default())?;
    let det = eig.values.iter().product();
    let max = eig.values.first().copied().unwrap_or(0.0);
    let min = eig.values.last().copied().unwrap_or(0.0);
    Ok((det, min, max))
}

pub fn scatter_analysis<F: AsRef<[f64]>, L: AsRef<str>>(features: &[F], labels: &[L]) -> Result<ScatterAnalysis> {
    if features.len() != labels.len() {
        return Err(Error::Mismatch {
            expected: features.len(),
            found: labels.len(),
        });
    }
    let classes = class_order(labels);
    if classes.len() != 2 {
        return Err(Error::ClassCount {
            found: classes.len(),
            labels: classes,
        });
    }
    let k = features[0].as_ref().len();
    if k == 0 {
        return Err(Error::Data("feature vectors are empty".into()));
    }
    if let Some(f) = features.iter().find(|f| f.as_ref().len() != k) {
        return Err(Error::Mismatch {
            expected: k,
            found: f.as_ref().len(),
        });
    }
    let total = features.len() as f64;
    let groups: Vec<Vec<DVector<f64>>> = classes
        .iter()
        .map(|c| {
            features
                .iter()
                .zip(labels)
                .filter(|(_, l)| l.as_ref() == c)
                .map(|(f, _)| DVector::from_column_slice(f.as_ref()))
                .collect()
        })
        .collect();
    for (c, g) in classes.iter().zip(&groups) {
        if g.len() < 2 {
            return Err(Error::Data(format!(
                "class `{c}` has {} sample(s); scatter analysis needs at least 2",
                g.len()
            )));
        }
    }

    let means: Vec<DVector<f64>> = groups
        .iter()
        .map(|g| g.iter().fold(DVector::zeros(k), |a, x| a + x) / g.len() as f64)
        .collect();
    let priors: Vec<f64> = groups.iter().map(|g| g.len() as f64 / total).collect();
    let global = means
        .iter()
        .zip(&priors)
        .fold(DVector::zeros(k), |a, (m, p)| a + m * *p);

    let mut sw = DMatrix::zeros(k, k);
    let mut sb = DMatrix::zeros(k, k);
    for ((g, mean), prior) in groups.iter().zip(&means).zip(&priors) {
        let cov = g.iter().fold(DMatrix::zeros(k, k), |a, x| {
            let d = x - mean;
            a + &d * d.transpose()
        }) / g.len() as f64;
        sw += cov * *prior;
        let d = mean - &global;
        sb += &d * d.transpose() * *prior;
    }
    let sm = &sb + &sw;

    let trace_sw = sw.trace();
    let trace_sm = sm.trace();
    let (det_sw, min_sw, max_sw) = determinant(&sw)?;
    let (det_sm, _, _) = determinant(&sm)?;

    let mut flags = Vec::new();
    let j1 = if trace_sw > 0.0 {
        Some(trace_sm / trace_sw)
    } else {
        flags.push("j1_undefined: trace(Sw) is zero".to_string());
        None
    };
    let j2 = if max_sw > 0.0 && min_sw > SINGULAR_RTOL * max_sw {
        Some(det_sm / det_sw)
    } else {
        flags.push(format!(
            "j2_undefined: Sw is singular (det(Sw) = {det_sw:e}, det(Sm) = {det_sm:e})"
        ));
        None
    };

    Ok(ScatterAnalysis {
        sw,
        sb,
        sm,
        trace_sw,
        trace_sm,
        det_sw,
        det_sm,
        j1,
        j2,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_dimensional_hand_case() {
        let s = scatter_analysis(&[[0.0], [2.0], [4.0], [6.0]], &["a", "a", "b", "b"]).unwrap();
        assert_eq!(s.sw[(0, 0)], 1.0);
        assert_eq!(s.sb[(0, 0)], 4.0);
        assert_eq!(s.sm[(0, 0)], 5.0);
        assert_eq!(s.j1, Some(5.0));
        assert_eq!(s.j2, Some(5.0));
        assert!(s.flags.is_empty());
    }

    #[test]
    fn identical_means_give_unit_ratios() {
        let f = [
            [1.0, 0.0],
            [-1.0, 0.5],
            [0.0, 1.0],
            [0.0, -0.5],
            [1.0, 1.0],
            [-1.0, -1.0],
        ];
        let l = ["a", "a", "b", "b", "b", "b"];
        // class a mean (0, 0.25), class b mean (0, 0.125): shift b to match
        let shifted: Vec<[f64; 2]> = f
            .iter()
            .zip(&l)
            .map(|(x, c)| if *c == "b" { [x[0], x[1] + 0.125] } else { *x })
            .collect();
        let s = scatter_analysis(&shifted, &l).unwrap();
        assert!(s.sb.amax() < 1e-15);
        assert_relative_eq!(s.j1.unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.j2.unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn collinear_features_leave_j2_undefined() {
        let f = [[0.0, 0.0], [1.0, 1.0], [3.0, 3.0], [4.0, 4.0]];
        let s = scatter_analysis(&f, &["a", "a", "b", "b"]).unwrap();
        assert!(s.j1.unwrap() > 1.0);
        assert_eq!(s.j2, None);
        assert_eq!(s.flags.len(), 1);
        let v = serde_json::to_value(&s).unwrap();
        assert!(v["j2"].is_null());
        assert_eq!(v["sw"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn small_class_is_rejected() {
        assert!(scatter_analysis(&[[0.0], [1.0], [2.0]], &["a", "a", "b"]).is_err());
        assert!(scatter_analysis(&[[0.0], [1.0]], &["a", "a"]).is_err());
    }
}
