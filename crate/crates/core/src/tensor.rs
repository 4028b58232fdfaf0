//! Dense complex linear algebra on tensor-product Hilbert spaces.
//!
//! Subsystems are ordered big-endian: particle 0 is the slowest-varying
//! index, so the joint basis state `|abc>` sits at `a*d1*d2 + b*d2 + c`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{FridgeError, Result};

/// Dense complex matrix used for every operator, state and superoperator.
pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Per-particle dimensions of a joint Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceShape {
    dims: Vec<usize>,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(FridgeError::InvalidShape("no particles".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(FridgeError::InvalidShape(format!(
                "particle dimension {d} is not 2 or 3"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim(&self, particle: usize) -> Result<usize> {
        self.check_index(particle)?;
        Ok(self.dims[particle])
    }

    pub fn check_index(&self, particle: usize) -> Result<()> {
        if particle >= self.dims.len() {
            return Err(FridgeError::IndexOutOfRange {
                index: particle,
                count: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Joint index of a configuration `(c_0, c_1, ...)`.
    pub fn index_of(&self, config: &[usize]) -> Result<usize> {
        if config.len() != self.dims.len() {
            return Err(FridgeError::DimensionMismatch {
                expected: self.dims.len(),
                found: config.len(),
            });
        }
        let mut index = 0;
        for (&c, &d) in config.iter().zip(&self.dims) {
            if c >= d {
                return Err(FridgeError::InvalidParameter {
                    name: "configuration".into(),
                    reason: format!("level {c} does not exist in a {d}-level particle"),
                });
            }
            index = index * d + c;
        }
        Ok(index)
    }

    /// Per-particle levels of a joint index.
    pub fn config_of(&self, mut index: usize) -> Vec<usize> {
        let mut config = vec![0; self.dims.len()];
        for (slot, &d) in config.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        config
    }

    /// Shape with one particle removed.
    pub fn without(&self, particle: usize) -> Result<Option<SpaceShape>> {
        self.check_index(particle)?;
        let dims: Vec<usize> = self
            .dims
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != particle)
            .map(|(_, &d)| d)
            .collect();
        Ok(if dims.is_empty() { None } else { Some(SpaceShape { dims }) })
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(values[r], 0.0)
        } else {
            ZERO
        }
    })
}

/// `|a><b|` on an `n`-dimensional space.
pub fn ket_bra(n: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(a, b)] = ONE;
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Lift a single-particle operator to the joint space (identity elsewhere).
pub fn embed(op: &ComplexMatrix, particle: usize, shape: &SpaceShape) -> Result<ComplexMatrix> {
    let d = shape.dim(particle)?;
    if op.nrows() != d || op.ncols() != d {
        return Err(FridgeError::DimensionMismatch {
            expected: d,
            found: op.nrows().max(op.ncols()),
        });
    }
    let before: usize = shape.dims()[..particle].iter().product();
    let after: usize = shape.dims()[particle + 1..].iter().product();
    Ok(kron(&kron(&identity(before), op), &identity(after)))
}

fn check_square(m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(FridgeError::DimensionMismatch {
            expected: n,
            found: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

/// Reduced state on the particles listed in `keep` (ascending order).
pub fn partial_trace_keep(
    rho: &ComplexMatrix,
    keep: &[usize],
    shape: &SpaceShape,
) -> Result<ComplexMatrix> {
    let n = shape.total_dim();
    check_square(rho, n)?;
    for &k in keep {
        shape.check_index(k)?;
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| shape.dims()[k]).collect();
    let m: usize = kept_dims.iter().product();
    let configs: Vec<Vec<usize>> = (0..n).map(|i| shape.config_of(i)).collect();
    let traced: Vec<usize> = (0..shape.num_particles())
        .filter(|j| !keep.contains(j))
        .collect();
    let reduced_index = |config: &[usize]| {
        keep.iter()
            .zip(&kept_dims)
            .fold(0, |acc, (&k, &d)| acc * d + config[k])
    };

    let mut out = ComplexMatrix::zeros(m, m);
    for a in 0..n {
        for b in 0..n {
            if traced.iter().all(|&t| configs[a][t] == configs[b][t]) {
                out[(reduced_index(&configs[a]), reduced_index(&configs[b]))] += rho[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Trace out one particle.
pub fn partial_trace(rho: &ComplexMatrix, particle: usize, shape: &SpaceShape) -> Result<ComplexMatrix> {
    shape.check_index(particle)?;
    let keep: Vec<usize> = (0..shape.num_particles()).filter(|&j| j != particle).collect();
    partial_trace_keep(rho, &keep, shape)
}

/// Single-particle reduced state.
pub fn reduced_state(rho: &ComplexMatrix, particle: usize, shape: &SpaceShape) -> Result<ComplexMatrix> {
    partial_trace_keep(rho, &[particle], shape)
}

/// Inverse of [`partial_trace`]: place `local` in slot `particle` and `rest` on
/// the remaining particles, i.e. `local ⊗_particle rest`.
pub fn insert_factor(
    local: &ComplexMatrix,
    particle: usize,
    rest: &ComplexMatrix,
    shape: &SpaceShape,
) -> Result<ComplexMatrix> {
    let d = shape.dim(particle)?;
    check_square(local, d)?;
    let rest_shape = shape.without(particle)?;
    let rest_dim = rest_shape.as_ref().map_or(1, SpaceShape::total_dim);
    check_square(rest, rest_dim)?;

    let n = shape.total_dim();
    let split = |i: usize| {
        let config = shape.config_of(i);
        let r = config
            .iter()
            .zip(shape.dims())
            .enumerate()
            .filter(|&(j, _)| j != particle)
            .fold(0, |acc, (_, (&c, &dj))| acc * dj + c);
        (config[particle], r)
    };
    let parts: Vec<(usize, usize)> = (0..n).map(split).collect();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        let (la, ra) = parts[a];
        let (lb, rb) = parts[b];
        local[(la, lb)] * rest[(ra, rb)]
    }))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `0.5 * ||a - b||_1` for Hermitian arguments.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|v| v.abs()).sum::<f64>()
}

/// Defects of a candidate density matrix. Callers compare them to their own
/// tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_defect <= tol && self.trace_defect <= tol && self.min_eigenvalue >= -tol
    }
}

pub fn check_density(rho: &ComplexMatrix) -> DensityDiagnostics {
    let hermiticity_defect = max_abs(&(rho - rho.adjoint()));
    let trace_defect = (trace(rho) - ONE).norm();
    let min_eigenvalue = hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0);
    DensityDiagnostics {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
    }
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Column-stacking vectorization: `vec(rho)[col * n + row] = rho[row, col]`.
pub fn vectorize(rho: &ComplexMatrix) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &nalgebra::DVector<Complex64>, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        assert!(max_abs(&(a - b)) <= tol, "{a} != {b}");
    }

    #[test]
    fn kron_identities() {
        assert_close(&kron(&identity(2), &identity(2)), &identity(4), 0.0);
        let a = Complex64::new(0.3, 0.1);
        let b = Complex64::new(-0.2, 0.5);
        let mut d = ComplexMatrix::zeros(2, 2);
        d[(0, 0)] = a;
        d[(1, 1)] = b;
        let got = kron(&diag(&[1.0, 0.0]), &d);
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(0, 0)] = a;
        want[(1, 1)] = b;
        assert_close(&got, &want, 0.0);
    }

    #[test]
    fn kron_block_structure() {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let got = kron(&x, &diag(&[2.0, 3.0]));
        #[rustfmt::skip]
        let want = ComplexMatrix::from_row_slice(4, 4, &[
            c(0.0), c(0.0), c(2.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(3.0),
            c(2.0), c(0.0), c(0.0), c(0.0),
            c(0.0), c(3.0), c(0.0), c(0.0),
        ]);
        assert_close(&got, &want, 0.0);
    }

    #[test]
    fn embed_cases() {
        let sigma = ComplexMatrix::from_row_slice(2, 2, &[c(0.0), I, -I, c(0.0)]);
        let single = SpaceShape::new(vec![2]).unwrap();
        assert_close(&embed(&sigma, 0, &single).unwrap(), &sigma, 0.0);

        let two = SpaceShape::new(vec![2, 2]).unwrap();
        assert_close(
            &embed(&diag(&[0.0, 1.0]), 1, &two).unwrap(),
            &diag(&[0.0, 1.0, 0.0, 1.0]),
            0.0,
        );

        let mixed = SpaceShape::new(vec![2, 3, 2]).unwrap();
        assert_close(&embed(&identity(3), 1, &mixed).unwrap(), &identity(12), 0.0);
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let shape = SpaceShape::new(vec![2, 3]).unwrap();
        assert!(matches!(
            embed(&identity(2), 1, &shape),
            Err(FridgeError::DimensionMismatch { expected: 3, .. })
        ));
        assert!(matches!(
            embed(&identity(2), 2, &shape),
            Err(FridgeError::IndexOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn shape_rejects_bad_dims() {
        assert!(SpaceShape::new(vec![]).is_err());
        assert!(SpaceShape::new(vec![2, 4]).is_err());
    }

    #[test]
    fn index_round_trip_is_big_endian() {
        let shape = SpaceShape::new(vec![2, 3, 2]).unwrap();
        assert_eq!(shape.index_of(&[0, 2, 0]).unwrap(), 4);
        assert_eq!(shape.index_of(&[1, 0, 1]).unwrap(), 7);
        for i in 0..12 {
            assert_eq!(shape.index_of(&shape.config_of(i)).unwrap(), i);
        }
        assert!(shape.index_of(&[0, 3, 0]).is_err());
    }

    #[test]
    fn partial_trace_of_product_state() {
        let shape = SpaceShape::new(vec![2, 2]).unwrap();
        let t1 = diag(&[0.7, 0.3]);
        let t2 = diag(&[0.6, 0.4]);
        let rho = kron(&t1, &t2);
        assert_close(&partial_trace(&rho, 1, &shape).unwrap(), &t1, 1e-15);
        assert_close(&partial_trace(&rho, 0, &shape).unwrap(), &t2, 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let shape = SpaceShape::new(vec![2, 2]).unwrap();
        let mut rho = ComplexMatrix::zeros(4, 4);
        for &(a, b) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            rho[(a, b)] = c(0.5);
        }
        assert_close(&partial_trace(&rho, 0, &shape).unwrap(), &identity(2).scale(0.5), 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let shape = SpaceShape::new(vec![2, 2]).unwrap();
        assert!(matches!(
            partial_trace(&identity(4), 5, &shape),
            Err(FridgeError::IndexOutOfRange { .. })
        ));
        assert!(partial_trace(&identity(3), 0, &shape).is_err());
    }

    #[test]
    fn insert_inverts_partial_trace_on_products() {
        let shape = SpaceShape::new(vec![2, 3, 2]).unwrap();
        let a = diag(&[0.6, 0.4]);
        let b = diag(&[0.5, 0.3, 0.2]);
        let cc = diag(&[0.9, 0.1]);
        let rho = kron(&kron(&a, &b), &cc);
        let rest = partial_trace(&rho, 1, &shape).unwrap();
        assert_close(&insert_factor(&b, 1, &rest, &shape).unwrap(), &rho, 1e-15);
    }

    #[test]
    fn density_diagnostics() {
        let d = check_density(&identity(2).scale(0.5));
        assert_abs_diff_eq!(d.hermiticity_defect, 0.0);
        assert_abs_diff_eq!(d.trace_defect, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.min_eigenvalue, 0.5, epsilon = 1e-15);

        let d = check_density(&diag(&[1.2, -0.2]));
        assert_abs_diff_eq!(d.trace_defect, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.min_eigenvalue, -0.2, epsilon = 1e-15);
        assert!(!d.is_valid(1e-12));
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        let v = vectorize(&m);
        assert_eq!(v[1], c(3.0));
        assert_eq!(v[2], c(2.0));
        assert_close(&unvectorize(&v, 2), &m, 0.0);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        assert_abs_diff_eq!(
            trace_distance(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])),
            1.0,
            epsilon = 1e-15
        );
    }
}
