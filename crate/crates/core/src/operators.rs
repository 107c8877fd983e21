//! Dense constructions of the walk operators and their generator bases.
//!
//! Everything in this module materializes `N_e x N_e` matrices, so it is
//! gated to small `n`. It exists to validate the structural claims the
//! spectral pipeline relies on — the production path never touches it.

use nalgebra::{Complex, DMatrix, DVector};

use crate::combinatorics::{binomial, hamming_weight};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

pub type C64 = Complex<f64>;

/// Largest `n` for which dense operators are built (N_e = 9 * 512 = 4608).
pub const DENSE_LIMIT: usize = 9;

fn check_dense(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DimensionZero);
    }
    if n > DENSE_LIMIT {
        return Err(Error::DenseLimit {
            n,
            max: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Signature of the (position, direction-slot) pair: +1 where bit `d0` of `p`
/// is clear, -1 where it is set. Direction slots are 0-based here; dimension
/// `d` (1-based) acts on bit `d - 1`.
pub fn signature(p: u64, d0: usize) -> f64 {
    if (p >> d0) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The normalized Walsh-Hadamard matrix `H^{(x) n}`, entries +-1/sqrt(N) with
/// sign `(-1)^<alpha|beta>`.
pub fn hadamard_dense(n: usize) -> Result<DMatrix<f64>> {
    check_dense(n)?;
    let size = 1usize << n;
    let scale = 1.0 / (size as f64).sqrt();
    Ok(DMatrix::from_fn(size, size, |a, b| {
        let dot = ((a & b) as u64).count_ones();
        if dot % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}

/// Perfect-shuffle permutation `P_{a,b}`: sends the row-major index `r b + c`
/// to the column-major index, so that `A (x) B = P_{a,b} (B (x) A) P_{b,a}`
/// for `A` of size `a x a` and `B` of size `b x b`.
pub fn perfect_shuffle(a: usize, b: usize) -> DMatrix<f64> {
    assert!(a >= 1 && b >= 1);
    let mut p = DMatrix::zeros(a * b, a * b);
    for r in 0..a {
        for c in 0..b {
            p[(r * b + c, c * a + r)] = 1.0;
        }
    }
    p
}

/// The Fourier operator on the workspace: `F = H_N (x) I_n`.
pub fn fourier_operator(n: usize) -> Result<DMatrix<f64>> {
    let h = hadamard_dense(n)?;
    Ok(h.kronecker(&DMatrix::identity(n, n)))
}

/// The shift operator in position (x) coin ordering, assembled as
/// `P S^{CS} P^T` from the per-dimension bit-flip blocks.
pub fn shift_operator(n: usize) -> Result<DMatrix<f64>> {
    check_dense(n)?;
    let big_n = 1usize << n;
    let n_e = n * big_n;
    let mut s_cs = DMatrix::zeros(n_e, n_e);
    for d in 1..=n {
        let offset = (d - 1) * big_n;
        let bit = 1usize << (d - 1);
        for p in 0..big_n {
            s_cs[(offset + p, offset + (p ^ bit))] = 1.0;
        }
    }
    let p = perfect_shuffle(big_n, n);
    Ok(&p * s_cs * p.transpose())
}

/// Grover diffusion `G = -I_n + 2|u><u|`.
pub fn grover_diffusion(n: usize) -> DMatrix<f64> {
    let two_over_n = 2.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            two_over_n - 1.0
        } else {
            two_over_n
        }
    })
}

/// Coin operator `C = I_N (x) G`.
pub fn coin_operator(n: usize) -> Result<DMatrix<f64>> {
    check_dense(n)?;
    let big_n = 1usize << n;
    Ok(DMatrix::identity(big_n, big_n).kronecker(&grover_diffusion(n)))
}

/// Oracle operator: block `-G` at each solution position, identity elsewhere.
pub fn oracle_operator(spec: &ProblemSpec) -> Result<DMatrix<f64>> {
    let n = spec.n();
    check_dense(n)?;
    let big_n = 1usize << n;
    let g = grover_diffusion(n);
    let mut o = DMatrix::identity(n * big_n, n * big_n);
    for &p in spec.solutions() {
        let base = p as usize * n;
        for i in 0..n {
            for j in 0..n {
                o[(base + i, base + j)] = -g[(i, j)];
            }
        }
    }
    Ok(o)
}

/// The uniform walk operator `U = SC` and the full iteration `Q = SCO`.
pub fn walk_operators(spec: &ProblemSpec) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let s = shift_operator(spec.n())?;
    let c = coin_operator(spec.n())?;
    let o = oracle_operator(spec)?;
    let u = &s * &c;
    let q = &u * o;
    Ok((u, q))
}

/// Eigenvalues of `U` with multiplicities: +-1 with `N_e/2 - N + 2` each, and
/// the conjugate pair `lambda_w = 1 - 2w/n + (2i/n) sqrt(w(n-w))` with
/// multiplicity `C(n, w)` for each weight `1 <= w <= n - 1`.
pub fn uniform_walk_spectrum(n: usize) -> Result<Vec<(C64, usize)>> {
    check_dense(n)?;
    let big_n = 1usize << n;
    let real_mult = n * big_n / 2 - big_n + 2;
    let mut out = vec![
        (C64::new(1.0, 0.0), real_mult),
        (C64::new(-1.0, 0.0), real_mult),
    ];
    for w in 1..n {
        let re = 1.0 - 2.0 * w as f64 / n as f64;
        let im = 2.0 / n as f64 * ((w * (n - w)) as f64).sqrt();
        let mult = binomial(n, w)? as usize;
        out.push((C64::new(re, im), mult));
        out.push((C64::new(re, -im), mult));
    }
    Ok(out)
}

/// Orthonormal basis of the complement of the uniform vector in R^k: a
/// `k x (k-1)` matrix with `<u|Lambda> = 0` and `Lambda^T Lambda = I`.
pub fn uniform_complement(k: usize) -> DMatrix<f64> {
    assert!(k >= 1);
    if k == 1 {
        return DMatrix::zeros(1, 0);
    }
    // Householder reflection sending e_1 to u_k; its remaining columns are an
    // orthonormal basis of the complement.
    let u = DVector::from_element(k, 1.0 / (k as f64).sqrt());
    let mut v = u.clone();
    v[0] -= 1.0;
    let norm2 = v.norm_squared();
    let house = DMatrix::identity(k, k) - &v * v.transpose() * (2.0 / norm2);
    house.columns(1, k - 1).into_owned()
}

/// Generator matrices of the walk eigenspaces.
///
/// `l1`, `l2`, `l3` are the solution / non-solution / coin-complement
/// generators; `l3_minus`, `l3_plus`, `l3_ring` split the per-block variant
/// whose columns are adapted to the diagonalized shift.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub l1: DMatrix<f64>,
    pub l2: DMatrix<f64>,
    pub l3: DMatrix<f64>,
    pub l3_minus: DMatrix<f64>,
    pub l3_plus: DMatrix<f64>,
    pub l3_ring: DMatrix<f64>,
}

impl GeneratorSet {
    /// Horizontal concatenation `[L1 L2 L3]`, a unitary `N_e x N_e` matrix.
    pub fn l123(&self) -> DMatrix<f64> {
        let n_e = self.l1.nrows();
        let mut out = DMatrix::zeros(n_e, n_e);
        let mut col = 0;
        for block in [&self.l1, &self.l2, &self.l3] {
            out.columns_mut(col, block.ncols()).copy_from(block);
            col += block.ncols();
        }
        out
    }
}

pub fn generators(spec: &ProblemSpec) -> Result<GeneratorSet> {
    let n = spec.n();
    check_dense(n)?;
    let big_n = 1usize << n;
    let n_e = n * big_n;
    let u_n = DVector::from_element(n, 1.0 / (n as f64).sqrt());

    let m = spec.m();
    let mut l1 = DMatrix::zeros(n_e, m);
    for (col, &p) in spec.solutions().iter().enumerate() {
        for i in 0..n {
            l1[(p as usize * n + i, col)] = u_n[i];
        }
    }
    let mut l2 = DMatrix::zeros(n_e, big_n - m);
    let mut col = 0;
    for p in 0..big_n as u64 {
        if !spec.is_solution(p) {
            for i in 0..n {
                l2[(p as usize * n + i, col)] = u_n[i];
            }
            col += 1;
        }
    }
    let lambda = uniform_complement(n);
    let mut l3 = DMatrix::zeros(n_e, n_e - big_n);
    for p in 0..big_n {
        for c in 0..n - 1 {
            for i in 0..n {
                l3[(p * n + i, p * (n - 1) + c)] = lambda[(i, c)];
            }
        }
    }

    // L3' splits each block by shift signature. Columns of the minus/plus
    // parts are eigenvectors of the diagonalized shift; the ring column mixes
    // both signatures.
    let mut minus_cols = Vec::new();
    let mut plus_cols = Vec::new();
    let mut ring_cols = Vec::new();
    for p in 0..big_n as u64 {
        let w = hamming_weight(p);
        let minus_slots: Vec<usize> = (0..n).filter(|&d| (p >> d) & 1 == 1).collect();
        let plus_slots: Vec<usize> = (0..n).filter(|&d| (p >> d) & 1 == 0).collect();
        if w >= 2 {
            let comp = uniform_complement(w);
            for c in 0..w - 1 {
                let mut col = DVector::zeros(n_e);
                for (row, &slot) in minus_slots.iter().enumerate() {
                    col[p as usize * n + slot] = comp[(row, c)];
                }
                minus_cols.push(col);
            }
        }
        if n - w >= 2 {
            let comp = uniform_complement(n - w);
            for c in 0..n - w - 1 {
                let mut col = DVector::zeros(n_e);
                for (row, &slot) in plus_slots.iter().enumerate() {
                    col[p as usize * n + slot] = comp[(row, c)];
                }
                plus_cols.push(col);
            }
        }
        if w >= 1 && w <= n - 1 {
            let mut col = DVector::zeros(n_e);
            let on_minus = ((n - w) as f64 / (n * w) as f64).sqrt();
            let on_plus = -((w as f64) / (n * (n - w)) as f64).sqrt();
            for &slot in &minus_slots {
                col[p as usize * n + slot] = on_minus;
            }
            for &slot in &plus_slots {
                col[p as usize * n + slot] = on_plus;
            }
            ring_cols.push(col);
        }
    }
    Ok(GeneratorSet {
        l1,
        l2,
        l3,
        l3_minus: DMatrix::from_columns(&minus_cols),
        l3_plus: DMatrix::from_columns(&plus_cols),
        l3_ring: DMatrix::from_columns(&ring_cols),
    })
}

/// Columns of `F` whose index carries the requested signature; spans the
/// shift eigenspace for that sign.
pub fn fourier_signature_basis(n: usize, sign: i32) -> Result<DMatrix<f64>> {
    let f = fourier_operator(n)?;
    let n_e = f.nrows();
    let want = if sign >= 0 { 1.0 } else { -1.0 };
    let cols: Vec<_> = (0..n_e)
        .filter(|&j| signature((j / n) as u64, j % n) == want)
        .map(|j| f.column(j).into_owned())
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// `|l_-> = F (|1_{N-1}> (x) |u_n>)`, the odd-signature uniform column.
pub fn l_minus_vector(n: usize) -> Result<DVector<f64>> {
    let f = fourier_operator(n)?;
    let big_n = 1usize << n;
    let mut v = DVector::zeros(n * big_n);
    let root = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        v[(big_n - 1) * n + i] = root;
    }
    Ok(&f * v)
}

/// One eigenvalue of an orthogonal matrix together with an orthonormal basis
/// of its eigenspace.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    pub value: C64,
    pub basis: DMatrix<C64>,
}

impl EigenGroup {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    pub fn phase(&self) -> f64 {
        self.value.arg()
    }

    /// Orthogonal projector onto this eigenspace.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.basis * self.basis.adjoint()
    }
}

/// Full eigendecomposition of a real orthogonal matrix.
///
/// The symmetric part `(A + A^T)/2` has eigenvalue `cos(phi)` on each
/// invariant plane of `A`; inside the eigenspace for one `cos` value the
/// normalized skew part is a complex structure that splits the plane into the
/// `e^{+-i phi}` eigenvectors. Real eigenvalues +-1 fall out as `cos = +-1`.
pub fn orthogonal_eigen(a: &DMatrix<f64>) -> Vec<EigenGroup> {
    let size = a.nrows();
    assert_eq!(size, a.ncols());
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mut groups: Vec<EigenGroup> = Vec::new();
    let mut start = 0;
    while start < size {
        let mut end = start + 1;
        while end < size
            && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]]).abs() < 1e-8
        {
            end += 1;
        }
        let cluster = &order[start..end];
        let c: f64 =
            cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let basis_cols: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let x = DMatrix::from_columns(&basis_cols);

        if c.abs() > 1.0 - 1e-9 {
            // Real eigenvalue: the symmetric-part eigenvectors are eigenvectors
            // of A itself.
            let value = C64::new(c.signum(), 0.0);
            let basis = x.map(|v| C64::new(v, 0.0));
            debug_assert!((a * &x - &x * c.signum()).norm() < 1e-7 * (size as f64));
            groups.push(EigenGroup { value, basis });
        } else {
            let dim = cluster.len();
            assert!(dim % 2 == 0, "conjugate-pair subspace must be even");
            let s = (1.0 - c * c).sqrt();
            let a_w = x.transpose() * a * &x;
            let b = (&a_w - DMatrix::identity(dim, dim) * c) / s;
            debug_assert!(
                (&b * &b + DMatrix::identity(dim, dim)).norm() < 1e-6 * dim as f64,
                "skew part is not a complex structure"
            );
            // Peel off (x, Bx) planes; B is orthogonal and skew, so each new
            // pair is automatically orthonormal to the previous ones.
            let mut chosen: Vec<DVector<f64>> = Vec::new();
            let mut plus_cols: Vec<DVector<C64>> = Vec::new();
            let mut minus_cols: Vec<DVector<C64>> = Vec::new();
            for seed in 0..dim {
                if chosen.len() == dim {
                    break;
                }
                let mut cand = DVector::zeros(dim);
                cand[seed] = 1.0;
                for prev in &chosen {
                    let overlap = prev.dot(&cand);
                    cand -= prev * overlap;
                }
                let norm = cand.norm();
                if norm < 1e-6 {
                    continue;
                }
                let xv = cand / norm;
                let yv = &b * &xv;
                let full_x = &x * &xv;
                let full_y = &x * &yv;
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                plus_cols.push(DVector::from_fn(size, |i, _| {
                    C64::new(full_x[i] * inv_sqrt2, -full_y[i] * inv_sqrt2)
                }));
                minus_cols.push(DVector::from_fn(size, |i, _| {
                    C64::new(full_x[i] * inv_sqrt2, full_y[i] * inv_sqrt2)
                }));
                chosen.push(xv);
                chosen.push(yv);
            }
            groups.push(EigenGroup {
                value: C64::new(c, s),
                basis: DMatrix::from_columns(&plus_cols),
            });
            groups.push(EigenGroup {
                value: C64::new(c, -s),
                basis: DMatrix::from_columns(&minus_cols),
            });
        }
        start = end;
    }
    groups.sort_by(|a, b| a.phase().partial_cmp(&b.phase()).unwrap());
    groups
}

/// Frobenius distance between the projectors spanned by two orthonormal
/// column sets; zero when they span the same subspace.
pub fn projector_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * a.transpose() - b * b.transpose()).norm()
}

/// Numerical rank of a real matrix.
pub fn rank_real(mat: &DMatrix<f64>, eps: f64) -> usize {
    if mat.ncols() == 0 || mat.nrows() == 0 {
        return 0;
    }
    mat.clone().svd(false, false).rank(eps)
}

/// Numerical rank of a complex matrix via its real embedding
/// `[[Re, -Im], [Im, Re]]` (the embedding doubles the rank).
pub fn rank_complex(mat: &DMatrix<C64>, eps: f64) -> usize {
    if mat.ncols() == 0 || mat.nrows() == 0 {
        return 0;
    }
    let (r, c) = mat.shape();
    let mut embed = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let v = mat[(i, j)];
            embed[(i, j)] = v.re;
            embed[(i, j + c)] = -v.im;
            embed[(i + r, j)] = v.im;
            embed[(i + r, j + c)] = v.re;
        }
    }
    let rank = rank_real(&embed, eps);
    debug_assert!(rank % 2 == 0);
    rank / 2
}

/// Dimension of the intersection of two subspaces given by orthonormal
/// (complex) bases: dim V + dim W - rank([V W]).
pub fn intersection_dim_complex(v: &DMatrix<C64>, w: &DMatrix<C64>, eps: f64) -> usize {
    if v.ncols() == 0 || w.ncols() == 0 {
        return 0;
    }
    let mut joined = DMatrix::zeros(v.nrows(), v.ncols() + w.ncols());
    joined.columns_mut(0, v.ncols()).copy_from(v);
    joined.columns_mut(v.ncols(), w.ncols()).copy_from(w);
    v.ncols() + w.ncols() - rank_complex(&joined, eps)
}

/// Real-basis convenience wrapper for [`intersection_dim_complex`].
pub fn intersection_dim_real(v: &DMatrix<f64>, w: &DMatrix<f64>, eps: f64) -> usize {
    if v.ncols() == 0 || w.ncols() == 0 {
        return 0;
    }
    let mut joined = DMatrix::zeros(v.nrows(), v.ncols() + w.ncols());
    joined.columns_mut(0, v.ncols()).copy_from(v);
    joined.columns_mut(v.ncols(), w.ncols()).copy_from(w);
    v.ncols() + w.ncols() - rank_real(&joined, eps)
}

pub fn to_complex(mat: &DMatrix<f64>) -> DMatrix<C64> {
    mat.map(|v| C64::new(v, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn assert_orthogonal(a: &DMatrix<f64>, tol: f64) {
        let id = DMatrix::identity(a.ncols(), a.ncols());
        assert!((a.transpose() * a - id).norm() < tol);
    }

    #[test]
    fn hadamard_basics() {
        let h1 = hadamard_dense(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h1[(0, 0)] - r).abs() < 1e-15);
        assert!((h1[(1, 1)] + r).abs() < 1e-15);
        for n in 1..=5 {
            let h = hadamard_dense(n).unwrap();
            let id = DMatrix::identity(1 << n, 1 << n);
            assert!((&h * &h - id).norm() < 1e-12);
        }
        // row 7, col 7 for n = 3: <111|111> = 3, odd, so negative sign
        let h3 = hadamard_dense(3).unwrap();
        assert!(h3[(7, 7)] < 0.0);
        assert!(hadamard_dense(10).is_err());
    }

    #[test]
    fn shuffle_matches_printed_example() {
        let p = perfect_shuffle(2, 3);
        // identity rows reordered as 1,3,5,2,4,6
        let expected_one_at = [0usize, 2, 4, 1, 3, 5]; // column with the 1, per row
        for (row, &col) in expected_one_at.iter().enumerate() {
            for j in 0..6 {
                let want = if j == col { 1.0 } else { 0.0 };
                assert_eq!(p[(row, j)], want, "row {row} col {j}");
            }
        }
        let p1k = perfect_shuffle(1, 4);
        assert!((p1k - DMatrix::<f64>::identity(4, 4)).norm() == 0.0);
    }

    #[test]
    fn shuffle_transpose_and_kronecker_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (a, b) in [(2usize, 3usize), (3, 4), (4, 2)] {
            let pab = perfect_shuffle(a, b);
            let pba = perfect_shuffle(b, a);
            assert!((pab.transpose() - &pba).norm() == 0.0);
            let ma = DMatrix::from_fn(a, a, |_, _| rng.gen::<f64>() - 0.5);
            let mb = DMatrix::from_fn(b, b, |_, _| rng.gen::<f64>() - 0.5);
            let lhs = ma.kronecker(&mb);
            let rhs = &pab * mb.kronecker(&ma) * &pba;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_acts_as_bit_flip() {
        for n in 1..=4 {
            let s = shift_operator(n).unwrap();
            let big_n = 1usize << n;
            // S|p, d> = |p xor 2^(d-1), d>
            for p in 0..big_n {
                for d0 in 0..n {
                    let from = p * n + d0;
                    let to = (p ^ (1 << d0)) * n + d0;
                    for row in 0..n * big_n {
                        let want = if row == to { 1.0 } else { 0.0 };
                        assert_eq!(s[(row, from)], want);
                    }
                }
            }
            let id = DMatrix::identity(n * big_n, n * big_n);
            assert!((&s * &s - id).norm() == 0.0);
            assert!(s.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn shift_diagonalizes_to_signatures() {
        for n in [2usize, 3, 4] {
            let s = shift_operator(n).unwrap();
            let f = fourier_operator(n).unwrap();
            let s_hat = &f * &s * &f;
            let n_e = s.nrows();
            for i in 0..n_e {
                for j in 0..n_e {
                    let want = if i == j {
                        signature((i / n) as u64, i % n)
                    } else {
                        0.0
                    };
                    assert!((s_hat[(i, j)] - want).abs() < 1e-10);
                }
            }
        }
        // first block of diag(FSF) for n = 3 is (+1, +1, +1)
        let s = shift_operator(3).unwrap();
        let f = fourier_operator(3).unwrap();
        let s_hat = &f * &s * &f;
        for i in 0..3 {
            assert!((s_hat[(i, i)] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_eigenspaces_split_evenly() {
        let n = 3;
        let s = shift_operator(n).unwrap();
        let groups = orthogonal_eigen(&s);
        assert_eq!(groups.len(), 2);
        for g in &groups {
            assert_eq!(g.multiplicity(), 12); // N_e / 2
        }
    }

    #[test]
    fn grover_and_coin() {
        let g = grover_diffusion(3);
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[-1.0, 2.0, 2.0, 2.0, -1.0, 2.0, 2.0, 2.0, -1.0],
        ) / 3.0;
        assert!((&g - expect).norm() < 1e-14);
        assert!((&g * &g - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);

        let u = DVector::from_element(3, 1.0 / 3.0f64.sqrt());
        assert!((&g * &u - &u).norm() < 1e-14);
        let lambda = uniform_complement(3);
        assert!((&g * &lambda + &lambda).norm() < 1e-14);

        for n in 2..=5 {
            let c = coin_operator(n).unwrap();
            let big_n = (1 << n) as f64;
            assert!((c.trace() - big_n * (2.0 - n as f64)).abs() < 1e-9);
            let f = fourier_operator(n).unwrap();
            assert!((&f * &c * &f - &c).norm() < 1e-10);
            let groups = orthogonal_eigen(&c);
            let n_e = c.nrows();
            for g in groups {
                if g.value.re > 0.0 {
                    assert_eq!(g.multiplicity(), 1 << n);
                } else {
                    assert_eq!(g.multiplicity(), n_e - (1 << n));
                }
            }
        }
    }

    #[test]
    fn oracle_structure() {
        let spec = ProblemSpec::new(3, vec![3, 6]).unwrap();
        let o = oracle_operator(&spec).unwrap();
        let g = grover_diffusion(3);
        for p in 0..8usize {
            for i in 0..3 {
                for j in 0..3 {
                    let v = o[(p * 3 + i, p * 3 + j)];
                    let want = if p == 3 || p == 6 {
                        -g[(i, j)]
                    } else if i == j {
                        1.0
                    } else {
                        0.0
                    };
                    assert!((v - want).abs() < 1e-14);
                }
            }
        }
        let id = DMatrix::identity(24, 24);
        assert!((&o * &o - id).norm() < 1e-12);

        // |1_3> (x) |u_3> is a -1 eigenvector
        let mut v = DVector::zeros(24);
        for i in 0..3 {
            v[3 * 3 + i] = 1.0 / 3.0f64.sqrt();
        }
        assert!((&o * &v + &v).norm() < 1e-12);

        let minus: usize = orthogonal_eigen(&o)
            .iter()
            .filter(|g| g.value.re < 0.0)
            .map(|g| g.multiplicity())
            .sum();
        assert_eq!(minus, spec.m());
    }

    #[test]
    fn walk_operator_fourier_blocks() {
        let spec = ProblemSpec::new(3, vec![3, 6]).unwrap();
        let (u, q) = walk_operators(&spec).unwrap();
        let id = DMatrix::identity(24, 24);
        assert!((u.transpose() * &u - &id).norm() < 1e-10);
        assert!((q.transpose() * &q - &id).norm() < 1e-10);

        let f = fourier_operator(3).unwrap();
        let u_hat = &f * &u * &f;
        let g = grover_diffusion(3);
        for p in 0..8u64 {
            // diagonal block is S_hat(p) G
            let mut block = DMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    block[(i, j)] = signature(p, i) * g[(i, j)];
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    assert!((u_hat[(p as usize * 3 + i, p as usize * 3 + j)] - block[(i, j)]).abs() < 1e-10);
                }
            }
        }
        // off-block entries vanish
        for i in 0..24 {
            for j in 0..24 {
                if i / 3 != j / 3 {
                    assert!(u_hat[(i, j)].abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn uniform_spectrum_matches_dense() {
        for n in 2..=4 {
            let spec = ProblemSpec::new(n, vec![0]).unwrap();
            let (u, _) = walk_operators(&spec).unwrap();
            let dense = orthogonal_eigen(&u);
            let mut expected = uniform_walk_spectrum(n).unwrap();
            expected.sort_by(|a, b| a.0.arg().partial_cmp(&b.0.arg()).unwrap());
            assert_eq!(dense.len(), expected.len());
            for (g, (ev, mult)) in dense.iter().zip(&expected) {
                assert!((g.value - ev).norm() < 1e-9, "n={n} {} vs {}", g.value, ev);
                assert_eq!(g.multiplicity(), *mult, "n={n} ev={ev}");
            }
        }
        // spot values
        let spec2 = uniform_walk_spectrum(2).unwrap();
        assert!(spec2.iter().any(|(ev, _)| (ev - C64::new(0.0, 1.0)).norm() < 1e-12));
        let spec4 = uniform_walk_spectrum(4).unwrap();
        let target = C64::new(0.5, 3.0f64.sqrt() / 2.0);
        assert!(spec4.iter().any(|(ev, _)| (ev - target).norm() < 1e-12));
        let spec3 = uniform_walk_spectrum(3).unwrap();
        let minus_mult = spec3
            .iter()
            .find(|(ev, _)| (ev - C64::new(-1.0, 0.0)).norm() < 1e-12)
            .unwrap()
            .1;
        assert_eq!(minus_mult, 6);
    }

    #[test]
    fn eigenvectors_of_u_hat_blocks() {
        // |v_w> = |rho>/sqrt(2w) - i|rho_bar>/sqrt(2(n-w)) is an eigenvector of
        // S_hat(p) G with eigenvalue lambda_w; also check <u|v_w> is nonzero.
        for n in 2..=6 {
            let g = grover_diffusion(n);
            for p in 1..((1u64 << n) - 1) {
                let w = hamming_weight(p);
                let mut block = DMatrix::<C64>::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        block[(i, j)] = C64::new(signature(p, i) * g[(i, j)], 0.0);
                    }
                }
                let mut v = DVector::<C64>::zeros(n);
                for d in 0..n {
                    if (p >> d) & 1 == 1 {
                        v[d] = C64::new(1.0 / (2.0 * w as f64).sqrt(), 0.0);
                    } else {
                        v[d] = C64::new(0.0, -1.0 / (2.0 * (n - w) as f64).sqrt());
                    }
                }
                let lambda = C64::new(
                    1.0 - 2.0 * w as f64 / n as f64,
                    2.0 / n as f64 * ((w * (n - w)) as f64).sqrt(),
                );
                assert!((&block * &v - &v * lambda).norm() < 1e-12, "n={n} p={p}");
                let alpha: C64 = v.iter().map(|z| z / (n as f64).sqrt()).sum();
                assert!(alpha.norm() > 1e-12);
            }
        }
    }

    #[test]
    fn generator_columns_are_orthonormal() {
        let spec = ProblemSpec::new(3, vec![2, 5]).unwrap();
        let gens = generators(&spec).unwrap();
        for block in [&gens.l1, &gens.l2, &gens.l3, &gens.l3_minus, &gens.l3_plus, &gens.l3_ring] {
            assert_orthogonal(block, 1e-12);
        }
        let l123 = gens.l123();
        assert_orthogonal(&l123, 1e-12);
        assert_eq!(gens.l1.ncols(), 2);
        assert_eq!(gens.l2.ncols(), 6);
        assert_eq!(gens.l3.ncols(), 16);
        assert_eq!(gens.l3_minus.ncols(), 12 - 8 + 1);
        assert_eq!(gens.l3_plus.ncols(), 12 - 8 + 1);
        assert_eq!(gens.l3_ring.ncols(), 8 - 2);

        // L1 columns live on solution blocks with uniform direction profile
        for (col, &p) in spec.solutions().iter().enumerate() {
            for i in 0..24 {
                let want = if i / 3 == p as usize {
                    1.0 / 3.0f64.sqrt()
                } else {
                    0.0
                };
                assert!((gens.l1[(i, col)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn l3_prime_parts_are_shift_eigenvectors() {
        let spec = ProblemSpec::new(3, vec![2, 5]).unwrap();
        let gens = generators(&spec).unwrap();
        let n = 3;
        // S_hat is diagonal with the signatures; columns of the minus part use
        // only sigma = -1 slots, plus part only sigma = +1 slots.
        for c in 0..gens.l3_minus.ncols() {
            for row in 0..gens.l3_minus.nrows() {
                if gens.l3_minus[(row, c)].abs() > 1e-14 {
                    assert_eq!(signature((row / n) as u64, row % n), -1.0);
                }
            }
        }
        for c in 0..gens.l3_plus.ncols() {
            for row in 0..gens.l3_plus.nrows() {
                if gens.l3_plus[(row, c)].abs() > 1e-14 {
                    assert_eq!(signature((row / n) as u64, row % n), 1.0);
                }
            }
        }
        // ring column for block p: sqrt((n-w)/(nw)) on sigma = -1 slots
        let p = 2usize; // weight 1
        let w = 1usize;
        let col = (0..gens.l3_ring.ncols())
            .find(|&c| (0..n).any(|d| gens.l3_ring[(p * n + d, c)].abs() > 1e-12))
            .unwrap();
        for d in 0..n {
            let v = gens.l3_ring[(p * n + d, col)];
            if signature(p as u64, d) < 0.0 {
                assert!((v - ((n - w) as f64 / (n * w) as f64).sqrt()).abs() < 1e-12);
            } else {
                assert!((v + (w as f64 / (n * (n - w)) as f64).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn l3_spans_match_and_fourier_invariance() {
        let spec = ProblemSpec::new(3, vec![2, 5]).unwrap();
        let gens = generators(&spec).unwrap();
        let mut l3p_cols: Vec<DVector<f64>> = Vec::new();
        for blk in [&gens.l3_minus, &gens.l3_plus, &gens.l3_ring] {
            for c in 0..blk.ncols() {
                l3p_cols.push(blk.column(c).into_owned());
            }
        }
        let l3p = DMatrix::from_columns(&l3p_cols);
        assert!(projector_distance(&gens.l3, &l3p) < 1e-10);

        let f = fourier_operator(3).unwrap();
        let fl3 = &f * &gens.l3;
        assert!(projector_distance(&gens.l3, &fl3) < 1e-10);
    }

    #[test]
    fn orthogonal_eigen_reconstructs() {
        // random orthogonal matrix via QR of a random matrix
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw = DMatrix::from_fn(12, 12, |_, _| rng.gen::<f64>() - 0.5);
        let q = raw.qr().q();
        let groups = orthogonal_eigen(&q);
        let total: usize = groups.iter().map(|g| g.multiplicity()).sum();
        assert_eq!(total, 12);
        let qc = to_complex(&q);
        for g in &groups {
            let residual = (&qc * &g.basis - &g.basis * g.value).norm();
            assert!(residual < 1e-8, "residual {residual}");
            let gram = g.basis.adjoint() * &g.basis;
            let id = DMatrix::<C64>::identity(g.multiplicity(), g.multiplicity());
            assert!((gram - id).norm() < 1e-8);
        }
        // projectors resolve the identity
        let mut sum = DMatrix::<C64>::zeros(12, 12);
        for g in &groups {
            sum += g.projector();
        }
        assert!((sum - DMatrix::<C64>::identity(12, 12)).norm() < 1e-8);
    }
}
