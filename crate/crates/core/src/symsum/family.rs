use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SymError;
use crate::linalg::{eigh, ginibre, haar_unitary, hermitian_norm, Matrix, RngStream};

/// Tolerance of the normalization certificate `‖(1/n)Σ A*A − I‖`.
pub const NORMALIZED_TOL: f64 = 1e-10;

/// Smallest eigenvalue of the mean Gram matrix accepted by
/// [`normalize_family`].
pub const MIN_GRAM_EIGENVALUE: f64 = 1e-8;

/// Which Gram sum the family is normalized against.
///
/// `Left` uses `A*A` everywhere: the certificate is on `(1/n)Σ A_j*A_j`, and
/// products read `A_{j1}*⋯A_{jd}* A_{jd}⋯A_{j1}`. `Right` runs the same
/// machinery on the adjoint family, so the certificate is on `(1/n)Σ A_j A_j*`
/// and products read `A_{j1}⋯A_{jd} A_{jd}*⋯A_{j1}*`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Left,
    Right,
}

/// An ordered family `A_1..A_n` of `m × m` matrices.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    ops: Vec<Matrix>,
    side: Side,
    /// The operators as seen by the left-convention formulas.
    work: Vec<Matrix>,
    normalized: bool,
    residual: f64,
    c: f64,
}

impl OperatorFamily {
    pub fn new(ops: Vec<Matrix>) -> Result<Self, SymError> {
        Self::with_side(ops, Side::Left)
    }

    pub fn with_side(ops: Vec<Matrix>, side: Side) -> Result<Self, SymError> {
        let Some(first) = ops.first() else {
            return Err(SymError::EmptyFamily);
        };
        let m = first.dim();
        if let Some(bad) = ops.iter().position(|a| a.dim() != m) {
            return Err(SymError::DimensionMismatch {
                index: bad,
                expected: m,
                got: ops[bad].dim(),
            });
        }
        if let Some(bad) = ops.iter().position(|a| !a.is_finite()) {
            return Err(SymError::NonFinite(bad));
        }
        let work: Vec<Matrix> = match side {
            Side::Left => ops.clone(),
            Side::Right => ops.iter().map(Matrix::adjoint).collect(),
        };
        let residual = gram_residual(&work);
        let c = work
            .iter()
            .map(|a| hermitian_norm(&a.adjoint_matmul(a)))
            .fold(0.0, f64::max);
        Ok(Self {
            ops,
            side,
            work,
            normalized: residual <= NORMALIZED_TOL,
            residual,
            c,
        })
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn m(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Operators in the orientation the sums are written for: `ops` on the
    /// left side, their adjoints on the right side.
    pub fn working_ops(&self) -> &[Matrix] {
        &self.work
    }

    /// Whether the certificate `‖(1/n)Σ A*A − I‖ ≤ 1e−10` held at construction.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// The certificate residual measured at construction.
    pub fn normalization_residual(&self) -> f64 {
        self.residual
    }

    /// Recomputes the certificate residual from the stored operators.
    pub fn recheck_normalization(&self) -> f64 {
        gram_residual(&self.work)
    }

    /// `C = sup_k ‖A_k*A_k‖`, cached.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// The same operators read with the other Gram convention.
    pub fn flipped(&self) -> Result<Self, SymError> {
        let side = match self.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        Self::with_side(self.ops.clone(), side)
    }

    pub(crate) fn require_normalized(&self) -> Result<(), SymError> {
        if self.normalized {
            Ok(())
        } else {
            Err(SymError::NotNormalized {
                residual: self.residual,
            })
        }
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson {
            n: self.n(),
            m: self.m(),
            ops: self
                .ops
                .iter()
                .map(|a| a.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &FamilyJson, side: Side) -> Result<Self, SymError> {
        if json.ops.len() != json.n {
            return Err(SymError::Format(format!(
                "\"n\" is {} but {} operators were given",
                json.n,
                json.ops.len()
            )));
        }
        let ops = json
            .ops
            .iter()
            .map(|entries| {
                let data = entries
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                Matrix::from_row_major(json.m, data).map_err(SymError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_side(ops, side)
    }

    pub fn read_json(path: &Path, side: Side) -> Result<Self, SymError> {
        let text = std::fs::read_to_string(path).map_err(|e| SymError::Io(e.to_string()))?;
        let json: FamilyJson =
            serde_json::from_str(&text).map_err(|e| SymError::Format(e.to_string()))?;
        Self::from_json(&json, side)
    }

    pub fn write_json(&self, path: &Path) -> Result<(), SymError> {
        let text =
            serde_json::to_string(&self.to_json()).map_err(|e| SymError::Format(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| SymError::Io(e.to_string()))
    }
}

/// On-disk family format: row-major `[re, im]` entries per operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub m: usize,
    pub ops: Vec<Vec<[f64; 2]>>,
}

/// `(1/n) Σ A*A`.
pub(crate) fn mean_gram(work: &[Matrix]) -> Matrix {
    let mut acc = Matrix::zeros(work[0].dim());
    for a in work {
        acc += &a.adjoint_matmul(a);
    }
    acc.scale_real(1.0 / work.len() as f64)
}

fn gram_residual(work: &[Matrix]) -> f64 {
    let mut g = mean_gram(work);
    for i in 0..g.dim() {
        g[(i, i)] -= 1.0;
    }
    hermitian_norm(&g)
}

/// Rescales `A_j ↦ A_j M^{−1/2}` with `M = (1/n)Σ A_j*A_j` so the result is
/// left-normalized.
pub fn normalize_family(ops: Vec<Matrix>) -> Result<OperatorFamily, SymError> {
    normalize_family_with_side(ops, Side::Left)
}

/// As [`normalize_family`]; on the right side the map is `A_j ↦ M^{−1/2} A_j`
/// with `M = (1/n)Σ A_j A_j*`.
pub fn normalize_family_with_side(
    ops: Vec<Matrix>,
    side: Side,
) -> Result<OperatorFamily, SymError> {
    let raw = OperatorFamily::with_side(ops, side)?;
    let eig = eigh(&mean_gram(raw.working_ops()));
    let min = eig.values[0];
    if !(min > MIN_GRAM_EIGENVALUE) {
        return Err(SymError::SingularGram {
            min_eigenvalue: min,
        });
    }
    let inv_sqrt = eig.apply(|x| 1.0 / x.sqrt());
    let scaled = raw
        .ops
        .iter()
        .map(|a| match side {
            Side::Left => a.matmul(&inv_sqrt),
            Side::Right => inv_sqrt.matmul(a),
        })
        .collect();
    let fam = OperatorFamily::with_side(scaled, side)?;
    fam.require_normalized()?;
    Ok(fam)
}

/// `n` Ginibre matrices of size `m`, normalized.
pub fn random_normalized_family(
    n: usize,
    m: usize,
    side: Side,
    rng: &mut RngStream,
) -> Result<OperatorFamily, SymError> {
    let ops = (0..n).map(|_| ginibre(m, rng)).collect();
    normalize_family_with_side(ops, side)
}

/// `n` independent Haar unitaries of size `m`.
pub fn unitary_family(n: usize, m: usize, side: Side, rng: &mut RngStream) -> OperatorFamily {
    let ops = (0..n).map(|_| haar_unitary(m, rng)).collect();
    OperatorFamily::with_side(ops, side).expect("unitaries share a dimension")
}

/// `1 × 1` family with entries `sqrt(x_j)`, so that `A_j*A_j = x_j`.
pub fn scalar_family(x: &[f64]) -> Result<OperatorFamily, SymError> {
    let ops = x
        .iter()
        .map(|&v| Matrix::scalar(Complex64::new(v.sqrt(), 0.0)))
        .collect();
    OperatorFamily::new(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::substream;

    #[test]
    fn scalar_normalization() {
        let fam = normalize_family(
            [1.0f64, 2.0, 3.0]
                .iter()
                .map(|&x| Matrix::scalar(Complex64::new(x.sqrt(), 0.0)))
                .collect(),
        )
        .unwrap();
        for (a, x) in fam.ops().iter().zip([1.0f64, 2.0, 3.0]) {
            assert!((a[(0, 0)] - Complex64::new((x / 2.0).sqrt(), 0.0)).norm() < 1e-14);
        }
        assert!(fam.is_normalized());
        assert!((fam.c() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn normalizing_twice_changes_nothing() {
        let mut rng = substream(2, 0);
        let fam = random_normalized_family(4, 3, Side::Left, &mut rng).unwrap();
        let again = normalize_family(fam.ops().to_vec()).unwrap();
        for (a, b) in fam.ops().iter().zip(again.ops()) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
    }

    #[test]
    fn right_side_certificate() {
        let mut rng = substream(3, 0);
        let fam = random_normalized_family(3, 3, Side::Right, &mut rng).unwrap();
        let mut g = Matrix::zeros(3);
        for a in fam.ops() {
            g += &a.matmul_adjoint(a);
        }
        assert!(g.scale_real(1.0 / 3.0).max_abs_diff(&Matrix::identity(3)) < 1e-10);
        assert!(fam.recheck_normalization() <= NORMALIZED_TOL);
    }

    #[test]
    fn shared_kernel_is_singular() {
        let ops = (1..4)
            .map(|k| Matrix::from_real_diagonal(&[k as f64, 0.0]))
            .collect();
        match normalize_family(ops) {
            Err(SymError::SingularGram { min_eigenvalue }) => assert!(min_eigenvalue.abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = substream(4, 0);
        let fam = random_normalized_family(3, 2, Side::Left, &mut rng).unwrap();
        let text = serde_json::to_string(&fam.to_json()).unwrap();
        let back: FamilyJson = serde_json::from_str(&text).unwrap();
        let fam2 = OperatorFamily::from_json(&back, Side::Left).unwrap();
        assert_eq!(fam.ops(), fam2.ops());
        let bad = FamilyJson { n: 2, ..back };
        assert!(OperatorFamily::from_json(&bad, Side::Left).is_err());
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let ops = vec![Matrix::identity(2), Matrix::identity(3)];
        assert!(matches!(
            OperatorFamily::new(ops),
            Err(SymError::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            OperatorFamily::new(vec![]),
            Err(SymError::EmptyFamily)
        ));
    }
}
