use super::{OperatorFamily, SymError};
use crate::linalg::Matrix;
use crate::partitions::{falling_factorial, tuples_with_kernel, Partition};

/// Largest `n` for the exhaustive tuple enumerations.
pub const MAX_ENUM_N: usize = 12;
/// Largest degree for the exhaustive tuple enumerations.
pub const MAX_ENUM_D: usize = 6;
/// Cap on the number of index subsets visited by [`e_wo_recursive`].
pub const MAX_SUBSETS: u128 = 5_000_000;

/// Agreement required between the two evaluations in [`folded_sum`],
/// relative to `max(1, ‖[γ]‖)`.
pub const FOLD_TOL: f64 = 1e-10;

fn check_enumerable(n: usize, d: usize) -> Result<(), SymError> {
    if d == 0 {
        return Err(SymError::ZeroDegree);
    }
    if n > MAX_ENUM_N || d > MAX_ENUM_D {
        return Err(SymError::Infeasible { n, d });
    }
    Ok(())
}

/// `B_{t_1}* ⋯ B_{t_k}* B_{t_k} ⋯ B_{t_1}`: the last index innermost.
fn nested_product(work: &[Matrix], tuple: &[usize]) -> Matrix {
    let (&last, rest) = tuple.split_last().expect("nonempty tuple");
    let inner = &work[last];
    let mut x = inner.adjoint_matmul(inner);
    for &j in rest.iter().rev() {
        x = x.congruence_by(&work[j]);
    }
    x
}

/// Every tuple in `{0..n}^d`, lexicographic.
fn all_tuples(n: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(d as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; d];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}

fn distinct(t: &[usize]) -> bool {
    t.iter().enumerate().all(|(i, x)| !t[..i].contains(x))
}

/// Without-replacement mean `E_wo,d`: the average over distinct index tuples
/// of `A_{j1}*⋯A_{jd}* A_{jd}⋯A_{j1}`, by exhaustive enumeration.
pub fn e_wo(fam: &OperatorFamily, d: usize) -> Result<Matrix, SymError> {
    let n = fam.n();
    if d > n {
        return Err(SymError::DegreeExceedsCount { d, n });
    }
    check_enumerable(n, d)?;
    let work = fam.working_ops();
    let mut acc = Matrix::zeros(fam.m());
    for t in all_tuples(n, d).filter(|t| distinct(t)) {
        acc += &nested_product(work, &t);
    }
    Ok(acc.scale_real(1.0 / falling_factorial(n, d) as f64))
}

/// With-replacement mean `E_wr,d`: the same average over all `n^d` tuples.
pub fn e_wr(fam: &OperatorFamily, d: usize) -> Result<Matrix, SymError> {
    let n = fam.n();
    check_enumerable(n, d)?;
    let work = fam.working_ops();
    let mut acc = Matrix::zeros(fam.m());
    for t in all_tuples(n, d) {
        acc += &nested_product(work, &t);
    }
    Ok(acc.scale_real(1.0 / (n as f64).powi(d as i32)))
}

/// `E_wr,d` by the nested map `X ↦ (1/n)Σ A_j* X A_j`, `d` applications
/// starting from `X = I`. Cost is linear in `d`.
pub fn e_wr_nested(fam: &OperatorFamily, d: usize) -> Result<Matrix, SymError> {
    if d == 0 {
        return Err(SymError::ZeroDegree);
    }
    let work = fam.working_ops();
    let inv_n = 1.0 / work.len() as f64;
    let mut x = gram_sum(work).scale_real(inv_n);
    for _ in 1..d {
        let mut next = Matrix::zeros(fam.m());
        for a in work {
            next += &x.congruence_by(a);
        }
        x = next.scale_real(inv_n);
    }
    Ok(x)
}

fn gram_sum(work: &[Matrix]) -> Matrix {
    let mut t = Matrix::zeros(work[0].dim());
    for a in work {
        t += &a.adjoint_matmul(a);
    }
    t
}

/// `C(x, k)` as `usize`.
fn binomial(x: usize, k: usize) -> usize {
    if k > x {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (x - i) / (i + 1))
}

/// Rank of a sorted subset in co-lexicographic order.
fn colex_rank(subset: &[usize]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(c, i + 1))
        .sum()
}

/// All `k`-subsets of `0..n` in co-lexicographic order (so position equals
/// [`colex_rank`]).
fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut s: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(s.clone());
        // smallest position that can move up without colliding
        let mut i = 0;
        while i < k {
            let limit = if i + 1 < k { s[i + 1] } else { n };
            if s[i] + 1 < limit {
                break;
            }
            i += 1;
        }
        if i == k {
            return out;
        }
        s[i] += 1;
        for (j, v) in s.iter_mut().enumerate().take(i) {
            *v = j;
        }
    }
}

/// `E_wo,d` by dynamic programming over sets of used indices.
///
/// With `G_S = Σ_{j∉S} A_j* G_{S∪{j}} A_j` and, at depth `d − 1`,
/// `G_S = T − Σ_{j∈S} A_j*A_j` (`T` the full Gram sum), the mean is
/// `G_∅ · (n−d)!/n!`. Visits `Σ_{k<d} C(n, k)` subsets instead of
/// `n!/(n−d)!` tuples, which makes `n = 32, d = 5` cheap.
pub fn e_wo_recursive(fam: &OperatorFamily, d: usize) -> Result<Matrix, SymError> {
    let n = fam.n();
    if d == 0 {
        return Err(SymError::ZeroDegree);
    }
    if d > n {
        return Err(SymError::DegreeExceedsCount { d, n });
    }
    let visited: u128 = (0..d).map(|k| binomial(n, k) as u128).sum();
    if visited > MAX_SUBSETS {
        return Err(SymError::Infeasible { n, d });
    }
    let work = fam.working_ops();
    let grams: Vec<Matrix> = work.iter().map(|a| a.adjoint_matmul(a)).collect();
    let mut total = Matrix::zeros(fam.m());
    for g in &grams {
        total += g;
    }

    let mut level: Vec<Matrix> = colex_subsets(n, d - 1)
        .iter()
        .map(|s| {
            let mut g = total.clone();
            for &j in s {
                g -= &grams[j];
            }
            g
        })
        .collect();
    for k in (0..d - 1).rev() {
        level = colex_subsets(n, k)
            .iter()
            .map(|s| {
                let mut acc = Matrix::zeros(fam.m());
                let mut grown = Vec::with_capacity(k + 1);
                for j in (0..n).filter(|j| !s.contains(j)) {
                    grown.clear();
                    grown.extend_from_slice(s);
                    let at = grown.partition_point(|&x| x < j);
                    grown.insert(at, j);
                    acc += &level[colex_rank(&grown)].congruence_by(&work[j]);
                }
                acc
            })
            .collect();
    }
    let g = level.pop().expect("level 0 has the empty set");
    Ok(g.scale_real(1.0 / falling_factorial(n, d) as f64))
}

/// `[σ] = Σ_{⟨i⟩ = σ} A_{i_d}*⋯A_{i_1}* A_{i_1}⋯A_{i_d}`: the sum over index
/// tuples with kernel `σ`, position 1 innermost. Zero when `ν(σ) > n`.
pub fn partition_sum(fam: &OperatorFamily, sigma: &Partition) -> Result<Matrix, SymError> {
    let n = fam.n();
    check_enumerable(n, sigma.d())?;
    let work = fam.working_ops();
    let mut acc = Matrix::zeros(fam.m());
    let mut reversed = vec![0; sigma.d()];
    for t in tuples_with_kernel(n, sigma) {
        for (r, &x) in reversed.iter_mut().zip(t.iter().rev()) {
            *r = x;
        }
        acc += &nested_product(work, &reversed);
    }
    Ok(acc)
}

/// `[[σ]] = Σ_{⟨i⟩ = σ} A_{i_d}*⋯A_{i_2}* (I − A_{i_1}*A_{i_1}) A_{i_2}⋯A_{i_d}`.
///
/// Position 1 must share its block, so `i_1` is a function of the other
/// indices and the sum equals `[γ] − [σ]` with `γ` the kernel on positions
/// `2..d`. Both forms are evaluated; the result is `[γ] − [σ]` and a
/// disagreement beyond [`FOLD_TOL`] is reported as an error.
pub fn folded_sum(fam: &OperatorFamily, sigma: &Partition) -> Result<Matrix, SymError> {
    if sigma.is_singleton(0) {
        return Err(SymError::SingletonFirstPosition(sigma.to_string()));
    }
    let gamma = sigma
        .delete_position(0)
        .expect("d ≥ 2 when position 1 is shared");
    let g = partition_sum(fam, &gamma)?;
    let s = partition_sum(fam, sigma)?;
    let folded = &g - &s;

    let work = fam.working_ops();
    let m = fam.m();
    let mut direct = Matrix::zeros(m);
    for t in tuples_with_kernel(fam.n(), sigma) {
        let a1 = &work[t[0]];
        let mut x = Matrix::identity(m);
        x -= &a1.adjoint_matmul(a1);
        for &j in &t[1..] {
            x = x.congruence_by(&work[j]);
        }
        direct += &x;
    }
    let residual = folded.max_abs_diff(&direct);
    if residual > FOLD_TOL * g.max_abs().max(1.0) {
        return Err(SymError::FoldMismatch {
            partition: sigma.to_string(),
            residual,
        });
    }
    Ok(folded)
}

/// Residual of the telescoping identity
/// `I − A_d*⋯A_1*A_1⋯A_d = Σ_j A_d*⋯A_{j+1}*(I − A_j*A_j)A_{j+1}⋯A_d`
/// for a single ordered product, as a max-entry difference.
pub fn folding_identity_residual(ops: &[Matrix]) -> f64 {
    let m = ops[0].dim();
    // left side: innermost A_1
    let mut prod = ops[0].adjoint_matmul(&ops[0]);
    for a in &ops[1..] {
        prod = prod.congruence_by(a);
    }
    let mut lhs = Matrix::identity(m);
    lhs -= &prod;

    let mut rhs = Matrix::zeros(m);
    for (j, a) in ops.iter().enumerate() {
        let mut x = Matrix::identity(m);
        x -= &a.adjoint_matmul(a);
        for b in &ops[j + 1..] {
            x = x.congruence_by(b);
        }
        rhs += &x;
    }
    lhs.max_abs_diff(&rhs)
}
