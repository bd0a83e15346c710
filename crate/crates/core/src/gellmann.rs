//! Generalized Gell-Mann basis and local expansions of bipartite operators.
//!
//! Element order: √(2/d)·I, then Λ_s^{kl} for k < l lexicographic, then
//! Λ_a^{kl} lexicographic, then Λ^l for l = 1..d−1. Every element has
//! Tr(ΛΛ) = 2; distinct elements are trace orthogonal.
//!
//! Diagonal elements use the standard traceless form
//! Λ^l = √(2/(l(l+1)))·(Σ_{j<l}|j⟩⟨j| − l|l⟩⟨l|), so that d = 3 gives the
//! usual λ₃ and λ₈.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{require_bipartite, sig17, ComplexMatrix, Tolerance, C64, ZERO};

/// Coefficients below this magnitude are not reported as settings.
pub const SETTING_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GellMannKind {
    Identity,
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    Diagonal(usize),
}

impl fmt::Display for GellMannKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GellMannKind::Identity => write!(f, "id"),
            GellMannKind::Symmetric(k, l) => write!(f, "sym({k},{l})"),
            GellMannKind::Antisymmetric(k, l) => write!(f, "anti({k},{l})"),
            GellMannKind::Diagonal(l) => write!(f, "diag({l})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GellMannElement {
    pub kind: GellMannKind,
    pub matrix: ComplexMatrix,
    /// Nonzero entries (row, col, value).
    entries: Vec<(usize, usize, C64)>,
}

impl GellMannElement {
    fn new(kind: GellMannKind, entries: Vec<(usize, usize, C64)>, d: usize) -> Self {
        let mut matrix = ComplexMatrix::zeros(d, d);
        for &(r, c, v) in &entries {
            matrix[(r, c)] = v;
        }
        GellMannElement {
            kind,
            matrix,
            entries,
        }
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct GellMannBasis {
    pub d: usize,
    pub elements: Vec<GellMannElement>,
}

pub fn gellmann_basis(d: usize) -> Result<GellMannBasis> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "Gell-Mann basis needs d >= 2, got {d}"
        )));
    }
    let mut elements = Vec::with_capacity(d * d);
    let s = (2.0 / d as f64).sqrt();
    elements.push(GellMannElement::new(
        GellMannKind::Identity,
        (0..d).map(|i| (i, i, C64::new(s, 0.0))).collect(),
        d,
    ));
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for k in 0..d {
        for l in k + 1..d {
            elements.push(GellMannElement::new(
                GellMannKind::Symmetric(k, l),
                vec![(k, l, one), (l, k, one)],
                d,
            ));
        }
    }
    for k in 0..d {
        for l in k + 1..d {
            elements.push(GellMannElement::new(
                GellMannKind::Antisymmetric(k, l),
                vec![(k, l, -i), (l, k, i)],
                d,
            ));
        }
    }
    for l in 1..d {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut entries: Vec<_> = (0..l).map(|j| (j, j, C64::new(c, 0.0))).collect();
        entries.push((l, l, C64::new(-(l as f64) * c, 0.0)));
        elements.push(GellMannElement::new(GellMannKind::Diagonal(l), entries, d));
    }
    Ok(GellMannBasis { d, elements })
}

impl GellMannBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(GellMannElement::label).collect()
    }

    /// c_μ = Tr(Λ^μ A)/2 for a Hermitian d×d matrix A.
    pub fn expand(&self, a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
        let n = a.require_hermitian(tol)?;
        if n != self.d {
            return Err(Error::ShapeMismatch {
                left: (self.d, self.d),
                right: a.shape(),
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|e| {
                e.entries
                    .iter()
                    .map(|&(r, c, v)| v * a[(c, r)])
                    .sum::<C64>()
                    .re
                    / 2.0
            })
            .collect())
    }

    /// Σ_μ c_μ Λ^μ.
    pub fn reconstruct(&self, coefficients: &[f64]) -> Result<ComplexMatrix> {
        if coefficients.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coefficients.len()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for (e, &c) in self.elements.iter().zip(coefficients) {
            for &(r, col, v) in &e.entries {
                out[(r, col)] += v * c;
            }
        }
        Ok(out)
    }
}

/// W = Σ_{μν} c_{μν} Λ^μ⊗Λ^ν.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub d: usize,
    /// Row μ, column ν; d² × d².
    pub coefficients: Vec<Vec<f64>>,
    basis: GellMannBasis,
}

impl LocalDecomposition {
    pub fn basis(&self) -> &GellMannBasis {
        &self.basis
    }

    pub fn get(&self, mu: GellMannKind, nu: GellMannKind) -> Option<f64> {
        let idx = |k| self.basis.elements.iter().position(|e| e.kind == k);
        Some(self.coefficients[idx(mu)?][idx(nu)?])
    }

    /// Builds a decomposition from a coefficient table.
    pub fn from_table(d: usize, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let basis = gellmann_basis(d)?;
        let n = basis.len();
        if coefficients.len() != n || coefficients.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "coefficient table must be {n}x{n}"
            )));
        }
        Ok(LocalDecomposition {
            d,
            coefficients,
            basis,
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for (mu, row) in self.coefficients.iter().enumerate() {
            for (nu, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                for &(i, j, a) in &self.basis.elements[mu].entries {
                    for &(k, l, b) in &self.basis.elements[nu].entries {
                        out[(i * d + k, j * d + l)] += a * b * c;
                    }
                }
            }
        }
        out
    }

    /// Nonzero terms sorted by |c| descending, then by label.
    pub fn settings(&self) -> Vec<Setting> {
        let labels = self.basis.labels();
        let mut out = Vec::new();
        for (mu, row) in self.coefficients.iter().enumerate() {
            for (nu, &c) in row.iter().enumerate() {
                if c.abs() > SETTING_THRESHOLD {
                    out.push(Setting {
                        mu,
                        nu,
                        mu_label: labels[mu].clone(),
                        nu_label: labels[nu].clone(),
                        coefficient: c,
                    });
                }
            }
        }
        out.sort_by(|a, b| {
            b.coefficient
                .abs()
                .total_cmp(&a.coefficient.abs())
                .then_with(|| (&a.mu_label, &a.nu_label).cmp(&(&b.mu_label, &b.nu_label)))
        });
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["mu_label", "nu_label", "coefficient"])?;
        for s in self.settings() {
            w.write_record([
                s.mu_label.as_str(),
                s.nu_label.as_str(),
                &sig17(s.coefficient),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Full table with labels; numbers printed with 17 significant digits.
    pub fn to_json_value(&self) -> serde_json::Value {
        let table: Vec<Vec<serde_json::Value>> = self
            .coefficients
            .iter()
            .map(|row| row.iter().map(|&c| sig17_json(c)).collect())
            .collect();
        serde_json::json!({
            "d": self.d,
            "labels": self.basis.labels(),
            "coefficients": table,
        })
    }
}

fn sig17_json(x: f64) -> serde_json::Value {
    serde_json::from_str(&sig17(x)).unwrap_or(serde_json::Value::Null)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Setting {
    pub mu: usize,
    pub nu: usize,
    pub mu_label: String,
    pub nu_label: String,
    pub coefficient: f64,
}

impl Setting {
    pub fn label(&self) -> String {
        format!("{}⊗{}", self.mu_label, self.nu_label)
    }
}

/// c_{μν} = Tr((Λ^μ⊗Λ^ν)W)/4.
pub fn expand_local(w: &ComplexMatrix, d: usize, tol: &Tolerance) -> Result<LocalDecomposition> {
    require_bipartite(w, d)?;
    w.require_hermitian(tol)?;
    let basis = gellmann_basis(d)?;
    let coefficients = basis
        .elements
        .iter()
        .map(|a| {
            basis
                .elements
                .iter()
                .map(|b| {
                    let mut acc = ZERO;
                    for &(i, j, x) in &a.entries {
                        for &(k, l, y) in &b.entries {
                            acc += x * y * w[(j * d + l, i * d + k)];
                        }
                    }
                    acc.re / 4.0
                })
                .collect()
        })
        .collect();
    Ok(LocalDecomposition {
        d,
        coefficients,
        basis,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SettingsReport {
    pub d: usize,
    pub count: usize,
    pub threshold: f64,
    pub settings: Vec<SettingEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SettingEntry {
    pub label: String,
    pub coefficient: f64,
}

pub fn measurement_settings_report(dec: &LocalDecomposition) -> SettingsReport {
    let settings: Vec<_> = dec
        .settings()
        .into_iter()
        .map(|s| SettingEntry {
            label: s.label(),
            coefficient: s.coefficient,
        })
        .collect();
    SettingsReport {
        d: dec.d,
        count: settings.len(),
        threshold: SETTING_THRESHOLD,
        settings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor, trace_product};
    use crate::scalar::Scalar;
    use crate::witness::{max_entangled_projector, witness_w_alpha, AlphaWitnessParams};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn d3_is_standard_gell_mann() {
        let b = gellmann_basis(3).unwrap();
        let r3 = 1.0 / 3f64.sqrt();
        let z = ZERO;
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let standard: [[C64; 9]; 8] = [
            [z, o, z, o, z, z, z, z, z],
            [z, -i, z, i, z, z, z, z, z],
            [o, z, z, z, -o, z, z, z, z],
            [z, z, o, z, z, z, o, z, z],
            [z, z, -i, z, z, z, i, z, z],
            [z, z, z, z, z, o, z, o, z],
            [z, z, z, z, z, -i, z, i, z],
            [o * r3, z, z, z, o * r3, z, z, z, o * (-2.0 * r3)],
        ];
        let find = |k| &b.elements.iter().find(|e| e.kind == k).unwrap().matrix;
        let kinds = [
            GellMannKind::Symmetric(0, 1),
            GellMannKind::Antisymmetric(0, 1),
            GellMannKind::Diagonal(1),
            GellMannKind::Symmetric(0, 2),
            GellMannKind::Antisymmetric(0, 2),
            GellMannKind::Symmetric(1, 2),
            GellMannKind::Antisymmetric(1, 2),
            GellMannKind::Diagonal(2),
        ];
        for (k, s) in kinds.iter().zip(standard.iter()) {
            let m = ComplexMatrix::from_vec(3, 3, s.to_vec()).unwrap();
            assert!(find(*k).max_abs_diff(&m) < 1e-15, "{k}");
        }
    }

    #[test]
    fn d2_is_pauli() {
        let b = gellmann_basis(2).unwrap();
        assert_eq!(b.labels(), ["id", "sym(0,1)", "anti(0,1)", "diag(1)"]);
        assert!(
            b.elements[0]
                .matrix
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );
        assert_eq!(
            b.elements[3].matrix,
            ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
        );
        assert!(gellmann_basis(1).is_err());
    }

    #[test]
    fn orthogonality() {
        for d in 2..9 {
            let b = gellmann_basis(d).unwrap();
            assert_eq!(b.len(), d * d);
            for (x, ex) in b.elements.iter().enumerate() {
                assert!(ex.matrix.is_hermitian(0.0));
                if x > 0 {
                    assert!(ex.matrix.trace().norm() < 1e-14);
                }
                for (y, ey) in b.elements.iter().enumerate() {
                    let t = trace_product(&ex.matrix, &ey.matrix).unwrap();
                    let want = if x == y { 2.0 } else { 0.0 };
                    assert!((t - c(want, 0.0)).norm() < 1e-13, "d={d} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn identity_expansion() {
        for d in 2..6 {
            let dec = expand_local(&ComplexMatrix::identity(d * d), d, &tol()).unwrap();
            let settings = dec.settings();
            assert_eq!(settings.len(), 1);
            assert!((settings[0].coefficient - d as f64 / 2.0).abs() < 1e-14);
            assert_eq!(settings[0].label(), "id⊗id");
        }
    }

    #[test]
    fn single_product_term() {
        let b = gellmann_basis(3).unwrap();
        let w = tensor(&b.elements[1].matrix, &b.elements[1].matrix).unwrap();
        let dec = expand_local(&w, 3, &tol()).unwrap();
        let s = dec.settings();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].mu, s[0].nu), (1, 1));
        assert!((s[0].coefficient - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_projector_in_pauli_basis() {
        // P⁺ = (II + XX − YY + ZZ)/4
        let dec = expand_local(&max_entangled_projector(2).unwrap(), 2, &tol()).unwrap();
        let s = dec.settings();
        assert_eq!(s.len(), 4);
        let get = |mu: usize, nu: usize| dec.coefficients[mu][nu];
        assert!((get(0, 0) - 0.25).abs() < 1e-15);
        assert!((get(1, 1) - 0.25).abs() < 1e-15);
        assert!((get(2, 2) + 0.25).abs() < 1e-15);
        assert!((get(3, 3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut w = ComplexMatrix::identity(4);
        w[(0, 3)] = c(1.0, 0.0);
        assert!(expand_local(&w, 2, &tol()).is_err());
        assert!(expand_local(&ComplexMatrix::identity(9), 2, &tol()).is_err());
    }

    /// W_α at d = 3, α = 1/2: 11 settings, listed in report order. Values
    /// frozen from the first verified run; a few are also checked against
    /// hand-computed traces.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn w_alpha_d3_fixture() {
        let p = AlphaWitnessParams::new(3, Scalar::ratio(1, 2), false).unwrap();
        let w = witness_w_alpha(&p).unwrap();
        let dec = expand_local(&w, 3, &tol()).unwrap();
        assert!(dec.reconstruct().max_abs_diff(&w) < 1e-12);
        let s = dec.settings();
        assert_eq!(s.len(), 11);
        use GellMannKind::*;
        let g = |a, b| dec.get(a, b).unwrap();
        assert!((g(Identity, Identity) - 4.0 / 9.0).abs() < 1e-15);
        assert!((g(Diagonal(1), Diagonal(2)) - (1.0 / 3.0) * 3f64.sqrt() / 4.0).abs() < 1e-15);
        // only P⁺ reaches the off-diagonal products: ∓(4/3)(2/3)/4
        assert!((g(Symmetric(0, 1), Symmetric(0, 1)) + 2.0 / 9.0).abs() < 1e-15);
        assert!((g(Diagonal(1), Diagonal(1)) - 7.0 / 36.0).abs() < 1e-15);
        let frozen: [(GellMannKind, GellMannKind, f64); 11] = [
            (Identity, Identity, 4.4444444444444442e-1),
            (
                Antisymmetric(0, 1),
                Antisymmetric(0, 1),
                2.2222222222222221e-1,
            ),
            (
                Antisymmetric(0, 2),
                Antisymmetric(0, 2),
                2.2222222222222221e-1,
            ),
            (
                Antisymmetric(1, 2),
                Antisymmetric(1, 2),
                2.2222222222222221e-1,
            ),
            (Symmetric(0, 1), Symmetric(0, 1), -2.2222222222222221e-1),
            (Symmetric(0, 2), Symmetric(0, 2), -2.2222222222222221e-1),
            (Symmetric(1, 2), Symmetric(1, 2), -2.2222222222222221e-1),
            (Diagonal(1), Diagonal(1), 1.9444444444444448e-1),
            (Diagonal(2), Diagonal(2), 1.9444444444444442e-1),
            (Diagonal(1), Diagonal(2), 1.4433756729740643e-1),
            (Diagonal(2), Diagonal(1), -1.4433756729740643e-1),
        ];
        for (a, b, v) in frozen {
            assert!((g(a, b) - v).abs() < 1e-14, "{a}⊗{b}: {}", g(a, b));
        }
    }

    #[test]
    fn csv_and_json_exports() {
        let dec = expand_local(&ComplexMatrix::identity(4), 2, &tol()).unwrap();
        assert_eq!(
            dec.to_csv().unwrap(),
            "mu_label,nu_label,coefficient\nid,id,1.0000000000000000e0\n"
        );
        let v = dec.to_json_value();
        assert_eq!(v["labels"][3], "diag(1)");
        assert_eq!(v["coefficients"].as_array().unwrap().len(), 4);
        let back = LocalDecomposition::from_table(
            2,
            v["coefficients"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| {
                    r.as_array()
                        .unwrap()
                        .iter()
                        .map(|x| x.as_f64().unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(back.coefficients, dec.coefficients);
    }
}
