//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Everything here is sized at compile time: [`Ket2`]/[`Mat2`] for a single
//! qubit and [`Ket4`]/[`Mat4`] for the idler ⊗ signal pair. The global basis
//! order is
//!
//! * polarization: `(V, H)`
//! * path: `(path 1, path 2)`
//! * pair: idler index slow, i.e. `(V⊗p1, V⊗p2, H⊗p1, H⊗p2)`
//!
//! and every other module relies on it.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Complex amplitude in double precision.
pub type Complex = Complex64;

/// Tolerance for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Tolerance for unitarity and completeness of composed operators.
pub const COMPOSED_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Single-qubit state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2(pub [Complex; 2]);

/// Two-qubit state vector, idler index slow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket4(pub [Complex; 4]);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex; 2]; 2]);

/// Row-major 4×4 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex; 4]; 4]);

impl Ket2 {
    pub const fn new(a0: Complex, a1: Complex) -> Self {
        Ket2([a0, a1])
    }

    /// Ket with real amplitudes.
    pub fn real(a0: f64, a1: f64) -> Self {
        Ket2([re(a0), re(a1)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL
    }

    pub fn scale(&self, k: Complex) -> Self {
        Ket2([self.0[0] * k, self.0[1] * k])
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(re(1.0 / n)))
    }

    /// `|self⟩⟨self|`.
    pub fn outer(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0] * a[0].conj(), a[0] * a[1].conj()],
            [a[1] * a[0].conj(), a[1] * a[1].conj()],
        ])
    }

    pub fn max_abs_diff(&self, other: &Ket2) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Ket4 {
    pub const fn new(a: [Complex; 4]) -> Self {
        Ket4(a)
    }

    pub fn real(a: [f64; 4]) -> Self {
        Ket4(a.map(re))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL
    }

    /// Amplitude of `idler_i ⊗ signal_s`.
    #[inline]
    pub fn at(&self, idler: usize, signal: usize) -> Complex {
        self.0[2 * idler + signal]
    }

    pub fn outer(&self) -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[i] * self.0[j].conj();
            }
        }
        Mat4(m)
    }

    pub fn max_abs_diff(&self, other: &Ket4) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for Ket4 {
    type Output = Ket4;
    fn add(self, rhs: Ket4) -> Ket4 {
        Ket4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

/// `idler ⊗ signal`.
pub fn tensor(idler: &Ket2, signal: &Ket2) -> Ket4 {
    Ket4(std::array::from_fn(|k| idler.0[k / 2] * signal.0[k % 2]))
}

/// Kronecker product `A ⊗ B` with `A` acting on the idler.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (col, x) in row.iter_mut().enumerate() {
            *x = a.0[r / 2][col / 2] * b.0[r % 2][col % 2];
        }
    }
    Mat4(m)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &Ket2, b: &Ket2) -> Complex {
    a.0[0].conj() * b.0[0] + a.0[1].conj() * b.0[1]
}

pub fn inner4(a: &Ket4, b: &Ket4) -> Complex {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Contracts the idler factor of `psi` with `⟨b|`, leaving the
/// (unnormalized) signal ket `(⟨b| ⊗ 1)|psi⟩`.
pub fn project_idler(b: &Ket2, psi: &Ket4) -> Ket2 {
    let s = |j: usize| b.0[0].conj() * psi.at(0, j) + b.0[1].conj() * psi.at(1, j);
    Ket2([s(0), s(1)])
}

/// Traces out the idler (slow) index.
pub fn partial_trace_idler(rho: &Mat4) -> Mat2 {
    let m = &rho.0;
    let e = |s: usize, t: usize| m[s][t] + m[2 + s][2 + t];
    Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO; 2]; 2]);

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Mat2(m.map(|row| row.map(re)))
    }

    pub fn diag(a: Complex, b: Complex) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    pub fn apply(&self, v: &Ket2) -> Ket2 {
        let m = &self.0;
        Ket2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, k: f64) -> Self {
        Mat2(self.0.map(|row| row.map(|x| x * k)))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - r, mean + r]
    }

    /// `self · rho · self†`.
    pub fn conjugate(&self, rho: &Mat2) -> Mat2 {
        *self * *rho * self.adjoint()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])
        }))
    }
}

impl Mat4 {
    pub fn identity() -> Self {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { ONE } else { ZERO })
        }))
    }

    pub fn apply(&self, v: &Ket4) -> Ket4 {
        Ket4(std::array::from_fn(|i| {
            (0..4).map(|j| self.0[i][j] * v.0[j]).sum()
        }))
    }

    pub fn adjoint(&self) -> Self {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].conj())
        }))
    }

    pub fn trace(&self) -> Complex {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Mat4::identity()) <= tol
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn arb_c() -> impl Strategy<Value = Complex> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_ket2() -> impl Strategy<Value = Ket2> {
        (arb_c(), arb_c()).prop_map(|(a, b)| Ket2::new(a, b))
    }

    fn arb_unit_ket2() -> impl Strategy<Value = Ket2> {
        arb_ket2().prop_filter_map("nonzero", |k| {
            (k.norm() > 1e-3).then(|| k.normalized().unwrap())
        })
    }

    fn arb_mat2() -> impl Strategy<Value = Mat2> {
        proptest::array::uniform2(proptest::array::uniform2(arb_c())).prop_map(Mat2)
    }

    // Generic 2x2 unitary e^{iδ}[[a, b], [-b*, a*]] with |a|²+|b|² = 1.
    fn arb_unitary2() -> impl Strategy<Value = Mat2> {
        (arb_unit_ket2(), 0.0..std::f64::consts::TAU).prop_map(|(k, delta)| {
            let (a, b) = (k.0[0], k.0[1]);
            let g = Complex::from_polar(1.0, delta);
            Mat2([[g * a, g * b], [-g * b.conj(), g * a.conj()]])
        })
    }

    #[test]
    fn tensor_basis_case() {
        let e0 = Ket2::real(1.0, 0.0);
        assert_eq!(tensor(&e0, &e0), Ket4::real([1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_with_diagonal_signal() {
        let t = tensor(
            &Ket2::real(1.0, 0.0),
            &Ket2::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        );
        let expected = Ket4::real([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0]);
        assert!(t.max_abs_diff(&expected) <= ALGEBRA_TOL);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&Mat2::IDENTITY, &Mat2::IDENTITY), Mat4::identity());
    }

    #[test]
    fn outer_examples() {
        assert_eq!(
            Ket2::real(1.0, 0.0).outer(),
            Mat2::real([[1.0, 0.0], [0.0, 0.0]])
        );
        let plus = Ket2::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2).outer();
        assert!(plus.max_abs_diff(&Mat2::real([[0.5, 0.5], [0.5, 0.5]])) <= ALGEBRA_TOL);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = Ket2::new(c(0.0, 1.0), re(0.0));
        let b = Ket2::new(re(1.0), re(0.0));
        assert_eq!(inner(&a, &b), c(0.0, -1.0));
        assert_eq!(inner(&b, &a), c(0.0, 1.0));
    }

    #[test]
    fn apply_identity() {
        let k = Ket2::new(c(0.3, -0.2), c(0.1, 0.9));
        assert_eq!(Mat2::IDENTITY.apply(&k), k);
        let k4 = Ket4::new([c(0.1, 0.2), c(0.3, 0.4), c(0.5, 0.6), c(0.7, 0.8)]);
        assert_eq!(Mat4::identity().apply(&k4), k4);
    }

    // Index-summation oracle for the partial trace, written independently
    // of the implementation's block formula.
    fn partial_trace_oracle(rho: &Mat4) -> Mat2 {
        let mut out = Mat2::ZERO;
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = re(0.0);
                for i in 0..2 {
                    let row = i * 2 + s;
                    let col = i * 2 + t;
                    acc += rho.0[row][col];
                }
                out.0[s][t] = acc;
            }
        }
        out
    }

    #[test]
    fn hermitian_eigenvalues_of_diagonal() {
        let ev = Mat2::real([[0.2, 0.0], [0.0, 0.8]]).hermitian_eigenvalues();
        assert!((ev[0] - 0.2).abs() < 1e-15 && (ev[1] - 0.8).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn tensor_norm_is_product(a in arb_ket2(), b in arb_ket2()) {
            let t = tensor(&a, &b);
            prop_assert!((t.norm() - a.norm() * b.norm()).abs() <= ALGEBRA_TOL);
            for i in 0..2 {
                for s in 0..2 {
                    prop_assert_eq!(t.at(i, s), a.0[i] * b.0[s]);
                }
            }
        }

        #[test]
        fn unit_tensor_unit_is_unit(a in arb_unit_ket2(), b in arb_unit_ket2()) {
            prop_assert!(tensor(&a, &b).is_normalized());
        }

        #[test]
        fn kron_mixed_product(
            a in arb_mat2(), b in arb_mat2(), x in arb_ket2(), y in arb_ket2()
        ) {
            let lhs = kron(&a, &b).apply(&tensor(&x, &y));
            let rhs = tensor(&a.apply(&x), &b.apply(&y));
            prop_assert!(lhs.max_abs_diff(&rhs) <= ALGEBRA_TOL);
        }

        #[test]
        fn kron_elementwise(a in arb_mat2(), b in arb_mat2()) {
            let k = kron(&a, &b);
            for i in 0..2 { for j in 0..2 { for s in 0..2 { for t in 0..2 {
                prop_assert_eq!(k.0[2 * i + s][2 * j + t], a.0[i][j] * b.0[s][t]);
            }}}}
        }

        #[test]
        fn outer_is_hermitian_rank_one(k in arb_ket2()) {
            let m = k.outer();
            prop_assert!(m.is_hermitian(ALGEBRA_TOL));
            prop_assert!((m.trace().re - k.norm_sqr()).abs() <= ALGEBRA_TOL);
            let det = m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0];
            prop_assert!(det.norm() <= ALGEBRA_TOL);
        }

        #[test]
        fn unitary_preserves_norm(u in arb_unitary2(), k in arb_ket2()) {
            prop_assert!(u.is_unitary(ALGEBRA_TOL));
            prop_assert!((u.apply(&k).norm() - k.norm()).abs() <= ALGEBRA_TOL);
        }

        #[test]
        fn partial_trace_matches_index_sum(
            rows in proptest::array::uniform4(proptest::array::uniform4(arb_c()))
        ) {
            let m = Mat4(rows);
            prop_assert!(partial_trace_idler(&m).max_abs_diff(&partial_trace_oracle(&m)) <= ALGEBRA_TOL);
        }

        #[test]
        fn partial_trace_of_product_state(a in arb_ket2(), b in arb_ket2()) {
            let rho = tensor(&a, &b).outer();
            let expected = b.outer().scale(a.norm_sqr());
            prop_assert!(partial_trace_idler(&rho).max_abs_diff(&expected) <= ALGEBRA_TOL);
        }

        // Random PSD input built as a mixture of two pure states.
        #[test]
        fn partial_trace_preserves_trace_and_positivity(
            x in proptest::array::uniform4(arb_c()),
            y in proptest::array::uniform4(arb_c()),
            w in 0.0..1.0f64,
        ) {
            let (x, y) = (Ket4(x), Ket4(y));
            let rho = Mat4(x.outer().0.map(|r| r.map(|e| e * w)))
                + Mat4(y.outer().0.map(|r| r.map(|e| e * (1.0 - w))));
            prop_assert!(rho.is_hermitian(ALGEBRA_TOL));
            let red = partial_trace_idler(&rho);
            prop_assert!(red.is_hermitian(ALGEBRA_TOL));
            prop_assert!((red.trace() - rho.trace()).norm() <= ALGEBRA_TOL);
            prop_assert!(red.hermitian_eigenvalues()[0] >= -ALGEBRA_TOL);
        }

        #[test]
        fn project_idler_matches_kron_route(b in arb_ket2(), psi in proptest::array::uniform4(arb_c())) {
            let psi = Ket4(psi);
            let direct = project_idler(&b, &psi);
            let via_inner = Ket2::new(
                inner4(&tensor(&b, &Ket2::real(1.0, 0.0)), &psi),
                inner4(&tensor(&b, &Ket2::real(0.0, 1.0)), &psi),
            );
            prop_assert!(direct.max_abs_diff(&via_inner) <= ALGEBRA_TOL);
        }
    }
}
