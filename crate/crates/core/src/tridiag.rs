//! Thomas algorithm for tridiagonal systems, generic over real and complex scalars.
//!
//! The factorization is kept so that repeated solves with the same matrix (one per
//! backward-Euler step) cost a single forward/backward sweep.

use num_traits::Num;

/// LU factors of a tridiagonal matrix without pivoting.
///
/// Row `i` of the matrix reads `lower[i-1]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1]`.
#[derive(Debug, Clone)]
pub struct TridiagonalLu<T> {
    // elimination multipliers lower[i-1]/pivot[i-1]
    mult: Vec<T>,
    upper: Vec<T>,
    inv_pivot: Vec<T>,
}

impl<T> TridiagonalLu<T>
where
    T: Num + Copy,
{
    /// Factor the matrix. Returns `None` if a zero pivot appears.
    pub fn factor(lower: &[T], diag: &[T], upper: &[T]) -> Option<Self> {
        let n = diag.len();
        assert!(n > 0, "empty tridiagonal system");
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);
        let mut pivot = diag[0];
        if pivot.is_zero() {
            return None;
        }
        let mut inv_pivot = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n - 1);
        inv_pivot.push(T::one() / pivot);
        for i in 1..n {
            let m = lower[i - 1] / pivot;
            pivot = diag[i] - m * upper[i - 1];
            if pivot.is_zero() {
                return None;
            }
            mult.push(m);
            inv_pivot.push(T::one() / pivot);
        }
        Some(Self {
            mult,
            upper: upper.to_vec(),
            inv_pivot,
        })
    }

    pub fn order(&self) -> usize {
        self.inv_pivot.len()
    }

    /// Solve in place: `rhs` is overwritten with the solution.
    pub fn solve_in_place(&self, rhs: &mut [T]) {
        let n = self.inv_pivot.len();
        assert_eq!(rhs.len(), n);
        let mut prev = rhs[0];
        for (r, &m) in rhs[1..].iter_mut().zip(&self.mult) {
            prev = *r - m * prev;
            *r = prev;
        }
        let mut next = rhs[n - 1] * self.inv_pivot[n - 1];
        rhs[n - 1] = next;
        let back = rhs[..n - 1]
            .iter_mut()
            .zip(&self.upper)
            .zip(&self.inv_pivot[..n - 1])
            .rev();
        for ((r, &u), &ip) in back {
            next = (*r - u * next) * ip;
            *r = next;
        }
    }
}

/// One-shot solve of a tridiagonal system.
pub fn solve<T>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>>
where
    T: Num + Copy,
{
    let lu = TridiagonalLu::factor(lower, diag, upper)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Some(x)
}

/// Tridiagonal matrix-vector product, used by tests and residual checks.
pub fn matvec<T>(lower: &[T], diag: &[T], upper: &[T], x: &[T]) -> Vec<T>
where
    T: Num + Copy,
{
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * x[i];
            if i > 0 {
                acc = acc + lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc = acc + upper[i] * x[i + 1];
            }
            acc
        })
        .collect()
}
