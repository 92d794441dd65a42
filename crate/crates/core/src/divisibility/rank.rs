use nalgebra::{DMatrix, DVector};

/// Full SVD `M = U·diag(s)·Vᵀ` with `s` descending, `U` m×m and `V` n×n.
///
/// Computed with faer; nalgebra's SVD is the fallback.
fn full_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    match a.svd() {
        Ok(svd) => {
            let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
            (
                DMatrix::from_fn(rows, rows, |i, j| u[(i, j)]),
                DVector::from_fn(rows.min(cols), |i, _| s[i]),
                DMatrix::from_fn(cols, cols, |i, j| v[(i, j)]),
            )
        }
        Err(_) => {
            let svd = m.clone().svd(true, true);
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
            let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
            let mut full_u = DMatrix::zeros(rows, rows);
            let mut full_v = DMatrix::zeros(cols, cols);
            for (k, &i) in order.iter().enumerate() {
                full_u.set_column(k, &u.column(i));
                full_v.set_column(k, &v_t.row(i).transpose());
            }
            let s = DVector::from_iterator(order.len(), order.iter().map(|&i| svd.singular_values[i]));
            (full_u, s, full_v)
        }
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    full_svd(m).1
}

pub(crate) fn count_above(sv: &DVector<f64>, threshold: f64) -> usize {
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Number of singular values above `rel_tol · σ_max`; 0 for the zero matrix.
pub fn numeric_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.iter().next() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    count_above(&sv, rel_tol * top)
}

/// Orthonormal basis of the right null space `{a : M·a = 0}` at relative
/// tolerance `rel_tol`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let top = singular_values(m).iter().next().copied().unwrap_or(0.0);
    null_space_at(m, rel_tol * top)
}

/// Right null space counting singular values `<= threshold` as zero.
pub(crate) fn null_space_at(m: &DMatrix<f64>, threshold: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols).map(|i| DVector::from_fn(cols, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    }
    let (_, s, v) = full_svd(m);
    let rank = count_above(&s, threshold);
    (rank..cols).map(|i| v.column(i).into_owned()).collect()
}

/// Moore–Penrose pseudoinverse treating singular values `<= threshold` as zero.
pub fn pseudo_inverse(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let (u, s, v) = full_svd(m);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (i, &sigma) in s.iter().enumerate() {
        if sigma > threshold {
            out += v.column(i) * u.column(i).transpose() / sigma;
        }
    }
    out
}
