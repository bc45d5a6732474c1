//! Differential operators with polynomial coefficients on `ℝᵈ`, kept in the
//! normal-ordered form `Σ c_{αβ} x^α ∂^β` with exact rational coefficients,
//! and trial functions `P(x)·e^{−Q(x)}` (polynomial `P`, quadratic `Q`) on
//! which such operators act in closed form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational scalar.
pub type Rational = Ratio<i64>;

/// Multi-index of a monomial.
pub type Exponent = Vec<u8>;

/// A polynomial `Σ c_α x^α` in `dim` variables.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<Exponent, T>,
}

impl<T: fmt::Debug> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Coefficient ring of polynomials: exact rationals or floats.
pub trait Coefficient:
    Clone + Zero + One + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Embedding of an exact rational.
    fn from_rational(r: Rational) -> Self;
    /// Embedding of a nonnegative integer.
    fn from_u64(n: u64) -> Self;
}

impl Coefficient for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn from_u64(n: u64) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl Coefficient for f64 {
    fn from_rational(r: Rational) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
}

fn unit_exponent(dim: usize, var: usize) -> Exponent {
    let mut e = vec![0u8; dim];
    e[var] = 1;
    e
}

impl<T: Coefficient> Polynomial<T> {
    /// The zero polynomial.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The constant `c`.
    pub fn constant(dim: usize, c: T) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    /// The coordinate function `x_var`.
    pub fn variable(dim: usize, var: usize) -> Self {
        Self::monomial(dim, unit_exponent(dim, var), T::one())
    }

    /// `c·x^α`.
    pub fn monomial(dim: usize, exponent: Exponent, c: T) -> Self {
        assert_eq!(exponent.len(), dim, "exponent length must equal the dimension");
        let mut p = Self::zero(dim);
        p.add_term(exponent, c);
        p
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &T)> {
        self.terms.iter()
    }

    /// Coefficient of `x^α`.
    pub fn coeff(&self, exponent: &[u8]) -> T {
        self.terms.get(exponent).cloned().unwrap_or_else(T::zero)
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, exponent: Exponent, c: T) {
        if c == T::zero() {
            return;
        }
        let v = self.terms.get(&exponent).cloned().unwrap_or_else(T::zero) + c;
        // Cancelled terms are dropped so that equality is structural.
        if v == T::zero() {
            self.terms.remove(&exponent);
        } else {
            self.terms.insert(exponent, v);
        }
    }

    /// `c·self`.
    pub fn scale(&self, c: T) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    /// `self + other`.
    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.add_term(e.clone(), v.clone());
        }
        out
    }

    /// `self − other`.
    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(-T::one()))
    }

    /// `self · other`.
    pub fn times(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, u.clone() * v.clone());
            }
        }
        out
    }

    /// `∂ self / ∂x_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            if e[var] > 0 {
                let mut f = e.clone();
                f[var] -= 1;
                out.add_term(f, v.clone() * T::from_u64(e[var] as u64));
            }
        }
        out
    }

    /// Substitutes `x_a ↦ Σ_b m[a][b] x_b`.
    pub fn linear_substitute(&self, m: &[Vec<T>]) -> Self {
        assert_eq!(m.len(), self.dim);
        let images: Vec<Self> = m
            .iter()
            .map(|row| {
                let mut p = Self::zero(self.dim);
                for (b, c) in row.iter().enumerate() {
                    p.add_term(unit_exponent(self.dim, b), c.clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            let mut term = Self::constant(self.dim, v.clone());
            for (a, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.times(&images[a]);
                }
            }
            out = out.plus(&term);
        }
        out
    }

    /// Converts coefficients to another ring.
    pub fn map_coefficients<S: Coefficient, F: Fn(&T) -> S>(&self, f: F) -> Polynomial<S> {
        let mut out = Polynomial::zero(self.dim);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), f(v));
        }
        out
    }
}

impl Polynomial<f64> {
    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }
}

impl Polynomial<Rational> {
    /// Value at a point (coefficients rounded to `f64`).
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.map_coefficients(|c| f64::from_rational(*c)).eval(x)
    }
}

/// A differential operator `Σ c_{αβ} x^α ∂^β` in normal order.
#[derive(Clone, PartialEq)]
pub struct DiffOperator {
    dim: usize,
    terms: BTreeMap<(Exponent, Exponent), Rational>,
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in a.iter().enumerate() {
                if k > 0 {
                    write!(f, "·x{i}^{k}")?;
                }
            }
            for (i, &k) in b.iter().enumerate() {
                if k > 0 {
                    write!(f, "·∂{i}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

fn falling_factorial(n: u8, k: u8) -> i64 {
    (0..k as i64).map(|j| n as i64 - j).product()
}

fn binomial(n: u8, k: u8) -> i64 {
    falling_factorial(n, k) / falling_factorial(k, k)
}

/// All multi-indices `κ ≤ bound` componentwise.
fn sub_indices(bound: &[u8]) -> Vec<Exponent> {
    let mut out = vec![Vec::new()];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|prefix: Exponent| {
                (0..=b).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

impl DiffOperator {
    /// The zero operator on `ℝ^dim`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Multiplication by the constant `c`.
    pub fn scalar(dim: usize, c: Rational) -> Self {
        Self::term(dim, vec![0; dim], vec![0; dim], c)
    }

    /// The identity operator.
    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Rational::one())
    }

    /// `c·x^α ∂^β`.
    pub fn term(dim: usize, x_exp: Exponent, d_exp: Exponent, c: Rational) -> Self {
        assert_eq!(x_exp.len(), dim);
        assert_eq!(d_exp.len(), dim);
        let mut op = Self::zero(dim);
        op.add_term(x_exp, d_exp, c);
        op
    }

    /// Multiplication by `x_var`.
    pub fn x(dim: usize, var: usize) -> Self {
        Self::term(dim, unit_exponent(dim, var), vec![0; dim], Rational::one())
    }

    /// The partial derivative `∂/∂x_var`.
    pub fn d(dim: usize, var: usize) -> Self {
        Self::term(dim, vec![0; dim], unit_exponent(dim, var), Rational::one())
    }

    /// Multiplication by a polynomial.
    pub fn multiplication(p: &Polynomial<Rational>) -> Self {
        let mut op = Self::zero(p.dim());
        for (e, c) in p.terms() {
            op.add_term(e.clone(), vec![0; p.dim()], *c);
        }
        op
    }

    fn add_term(&mut self, x_exp: Exponent, d_exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (x_exp, d_exp);
        let v = *self.terms.get(&key).unwrap_or(&Rational::zero()) + c;
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Normal-ordered terms `((α, β), c)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(Exponent, Exponent), &Rational)> {
        self.terms.iter()
    }

    /// True for the zero operator.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the operator is multiplication by the constant `c`.
    pub fn as_scalar(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let ((a, b), c) = self.terms.iter().next().expect("one term");
            if a.iter().all(|&k| k == 0) && b.iter().all(|&k| k == 0) {
                return Some(*c);
            }
        }
        None
    }

    /// Highest order of differentiation.
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .map(|(_, b)| b.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// `c·self`.
    pub fn scale(&self, c: Rational) -> Self {
        let mut out = Self::zero(self.dim);
        for ((a, b), v) in &self.terms {
            out.add_term(a.clone(), b.clone(), *v * c);
        }
        out
    }

    /// `self + other`.
    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for ((a, b), v) in &other.terms {
            out.add_term(a.clone(), b.clone(), *v);
        }
        out
    }

    /// `self − other`.
    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(-Rational::one()))
    }

    /// Composition `self ∘ other`, normal-ordered by the Leibniz rule
    /// `∂^β x^γ = Σ_κ C(β,κ) γ!/(γ−κ)! x^{γ−κ} ∂^{β−κ}`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for ((a, b), u) in &self.terms {
            for ((g, d), v) in &other.terms {
                let bound: Exponent = b.iter().zip(g).map(|(x, y)| (*x).min(*y)).collect();
                for k in sub_indices(&bound) {
                    let mut coeff = *u * *v;
                    for i in 0..self.dim {
                        coeff *= Rational::from_integer(binomial(b[i], k[i]) * falling_factorial(g[i], k[i]));
                    }
                    let x_exp: Exponent = (0..self.dim).map(|i| a[i] + g[i] - k[i]).collect();
                    let d_exp: Exponent = (0..self.dim).map(|i| b[i] - k[i] + d[i]).collect();
                    out.add_term(x_exp, d_exp, coeff);
                }
            }
        }
        out
    }

    /// Commutator `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).minus(&other.compose(self))
    }

    /// Coefficient of `x^α ∂^β`.
    pub fn coeff(&self, x_exp: &[u8], d_exp: &[u8]) -> Rational {
        *self
            .terms
            .get(&(x_exp.to_vec(), d_exp.to_vec()))
            .unwrap_or(&Rational::zero())
    }

    /// Applies the operator to a polynomial, exactly.
    pub fn apply_polynomial<T: Coefficient>(&self, p: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.dim, p.dim());
        let mut out = Polynomial::zero(self.dim);
        for ((a, b), c) in &self.terms {
            let mut q = p.clone();
            for (var, &k) in b.iter().enumerate() {
                for _ in 0..k {
                    q = q.derivative(var);
                }
            }
            let m = Polynomial::monomial(self.dim, a.clone(), T::from_rational(*c));
            out = out.plus(&m.times(&q));
        }
        out
    }

    /// Applies the operator to `P e^{−Q}`; the result is again of this form.
    pub fn apply<T: Coefficient>(&self, f: &PolyExpQuadratic<T>) -> PolyExpQuadratic<T> {
        assert_eq!(self.dim, f.dim());
        let mut out = Polynomial::zero(self.dim);
        // Cache derivatives ∂^β(P e^{−Q}) / e^{−Q} by multi-index.
        let mut cache: BTreeMap<Exponent, Polynomial<T>> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let q = f.derivative_prefactor(b, &mut cache);
            let m = Polynomial::monomial(self.dim, a.clone(), T::from_rational(*c));
            out = out.plus(&m.times(&q));
        }
        PolyExpQuadratic {
            prefactor: out,
            quadratic: f.quadratic.clone(),
        }
    }
}

/// A function `P(x)·e^{−Q(x)}` with polynomial `P` and polynomial exponent `Q`
/// (a positive quadratic form for Schwartz trial functions).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyExpQuadratic<T> {
    /// The polynomial prefactor `P`.
    pub prefactor: Polynomial<T>,
    /// The exponent `Q`.
    pub quadratic: Polynomial<T>,
}

impl<T: Coefficient> PolyExpQuadratic<T> {
    /// `P·e^{−c|x|²}`.
    pub fn isotropic(prefactor: Polynomial<T>, c: T) -> Self {
        let dim = prefactor.dim();
        let mut q = Polynomial::zero(dim);
        for var in 0..dim {
            let mut e = vec![0u8; dim];
            e[var] = 2;
            q = q.plus(&Polynomial::monomial(dim, e, c.clone()));
        }
        Self {
            prefactor,
            quadratic: q,
        }
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.prefactor.dim()
    }

    /// `x ↦ f(Mx)`.
    pub fn linear_substitute(&self, m: &[Vec<T>]) -> Self {
        Self {
            prefactor: self.prefactor.linear_substitute(m),
            quadratic: self.quadratic.linear_substitute(m),
        }
    }

    /// Linear combination `a·self + b·other` (same exponent required).
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert!(self.quadratic == other.quadratic, "exponents must agree");
        Self {
            prefactor: self.prefactor.scale(a).plus(&other.prefactor.scale(b)),
            quadratic: self.quadratic.clone(),
        }
    }

    fn derivative_prefactor(&self, b: &[u8], cache: &mut BTreeMap<Exponent, Polynomial<T>>) -> Polynomial<T> {
        if let Some(p) = cache.get(b) {
            return p.clone();
        }
        let result = match b.iter().position(|&k| k > 0) {
            None => self.prefactor.clone(),
            Some(var) => {
                let mut lower = b.to_vec();
                lower[var] -= 1;
                let p = self.derivative_prefactor(&lower, cache);
                // ∂(P e^{−Q}) = (∂P − P ∂Q) e^{−Q}.
                p.derivative(var).minus(&p.times(&self.quadratic.derivative(var)))
            }
        };
        cache.insert(b.to_vec(), result.clone());
        result
    }
}

impl PolyExpQuadratic<f64> {
    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.prefactor.eval(x) * (-self.quadratic.eval(x)).exp()
    }
}

impl PolyExpQuadratic<Rational> {
    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.prefactor.eval(x) * (-self.quadratic.eval(x)).exp()
    }

    /// Float copy.
    pub fn to_f64(&self) -> PolyExpQuadratic<f64> {
        PolyExpQuadratic {
            prefactor: self.prefactor.map_coefficients(|c| f64::from_rational(*c)),
            quadratic: self.quadratic.map_coefficients(|c| f64::from_rational(*c)),
        }
    }
}

/// Solves `A X = I` over the rationals by Gauss–Jordan elimination; `None`
/// for singular `A`.
pub fn rational_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rational::one() / m[col][col];
        for x in m[col].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn heisenberg_relation() {
        let c = DiffOperator::d(1, 0).commutator(&DiffOperator::x(1, 0));
        assert_eq!(c.as_scalar(), Some(r(1)));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let dim = 2;
        let a = DiffOperator::x(dim, 0).compose(&DiffOperator::d(dim, 1)).plus(&DiffOperator::d(dim, 0));
        let b = DiffOperator::x(dim, 1)
            .compose(&DiffOperator::x(dim, 1))
            .compose(&DiffOperator::d(dim, 0));
        let p = Polynomial::monomial(dim, vec![3, 2], r(1)).plus(&Polynomial::variable(dim, 1));
        let lhs = a.compose(&b).apply_polynomial(&p);
        let rhs = a.apply_polynomial(&b.apply_polynomial(&p));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gaussian_derivative() {
        let f = PolyExpQuadratic::isotropic(Polynomial::constant(1, r(1)), r(1));
        let g = DiffOperator::d(1, 0).apply(&f);
        // d/dx e^{−x²} = −2x e^{−x²}.
        assert_eq!(g.prefactor, Polynomial::monomial(1, vec![1], r(-2)));
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = vec![vec![r(0), r(2)], vec![r(2), r(0)]];
        let inv = rational_inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![r(0), Rational::new(1, 2)], vec![Rational::new(1, 2), r(0)]]);
        assert!(rational_inverse(&[vec![r(1), r(1)], vec![r(1), r(1)]]).is_none());
    }
}
