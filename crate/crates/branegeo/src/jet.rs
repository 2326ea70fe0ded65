//! Truncated multivariate jets: value plus raw partial derivatives of a
//! smooth function of the chart variables, carried to order K <= 3.
//!
//! Order 3 is the minimum that supports the deepest operator compositions in
//! the engine (e.g. S(S(v)) and the Ricci operator ∂∧∂, which consume three
//! derivative levels of the embedding). Storage is dense and symmetric:
//! value, gradient (m), Hessian (m(m+1)/2), third derivatives
//! (m(m+1)(m+2)/6). Coefficients are raw partial derivatives, not
//! factorial-normalised Taylor coefficients, so products follow the Leibniz
//! rule directly.
//!
//! A jet with `vars == 0` is a broadcastable constant: it combines with jets
//! in any number of variables at any order. For non-constant operands the
//! result order is the minimum of the operand orders, so derivative
//! information is never fabricated.

/// Maximum supported truncation order.
pub const MAX_ORDER: u8 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    vars: usize,
    order: u8,
    /// Layout: [value | grad (m) | hess i<=j | third i<=j<=k], each block
    /// present only up to `order`.
    c: Vec<f64>,
}

fn hess_len(m: usize) -> usize {
    m * (m + 1) / 2
}

fn third_len(m: usize) -> usize {
    m * (m + 1) * (m + 2) / 6
}

fn storage_len(m: usize, order: u8) -> usize {
    let mut n = 1;
    if order >= 1 {
        n += m;
    }
    if order >= 2 {
        n += hess_len(m);
    }
    if order >= 3 {
        n += third_len(m);
    }
    n
}

/// Index of the (i, j) entry, i <= j, in the upper-triangular Hessian block.
fn hidx(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < m);
    // Row offset: sum over a < i of (m - a) = i*(2m - i + 1)/2.
    i * (2 * m - i + 1) / 2 + (j - i)
}

/// Index of the sorted (i, j, k) entry in the symmetric third-order block.
fn tidx(m: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i <= j && j <= k && k < m);
    // Triples whose smallest index is below i, then pairs (j, k) within the
    // remaining variable range.
    let mut base = 0;
    for a in 0..i {
        base += hess_len(m - a);
    }
    let mp = m - i;
    let (jp, kp) = (j - i, k - i);
    base + jp * (2 * mp - jp + 1) / 2 + (kp - jp)
}

impl Jet {
    /// Broadcastable constant: combines with jets of any arity and order.
    pub fn constant(value: f64) -> Self {
        Jet {
            vars: 0,
            order: MAX_ORDER,
            c: vec![value],
        }
    }

    /// The i-th chart variable as a jet: value `x`, unit gradient slot i.
    pub fn variable(x: f64, i: usize, vars: usize, order: u8) -> Self {
        assert!(i < vars, "variable index {i} out of range for {vars} vars");
        assert!(order >= 1 && order <= MAX_ORDER);
        let mut c = vec![0.0; storage_len(vars, order)];
        c[0] = x;
        c[1 + i] = 1.0;
        Jet { vars, order, c }
    }

    pub fn zero_jet(vars: usize, order: u8) -> Self {
        Jet {
            vars,
            order,
            c: vec![0.0; storage_len(vars, order)],
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_constant(&self) -> bool {
        self.vars == 0
    }

    fn g(&self, i: usize) -> f64 {
        if self.vars == 0 {
            return 0.0;
        }
        debug_assert!(self.order >= 1);
        self.c[1 + i]
    }

    fn h(&self, i: usize, j: usize) -> f64 {
        if self.vars == 0 {
            return 0.0;
        }
        debug_assert!(self.order >= 2);
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.c[1 + self.vars + hidx(self.vars, a, b)]
    }

    fn t(&self, i: usize, j: usize, k: usize) -> f64 {
        if self.vars == 0 {
            return 0.0;
        }
        debug_assert!(self.order >= 3);
        let mut s = [i, j, k];
        s.sort_unstable();
        self.c[1 + self.vars + hess_len(self.vars) + tidx(self.vars, s[0], s[1], s[2])]
    }

    fn set_g(&mut self, i: usize, v: f64) {
        self.c[1 + i] = v;
    }

    fn set_h(&mut self, i: usize, j: usize, v: f64) {
        let off = 1 + self.vars;
        self.c[off + hidx(self.vars, i, j)] = v;
    }

    fn set_t(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let off = 1 + self.vars + hess_len(self.vars);
        self.c[off + tidx(self.vars, i, j, k)] = v;
    }

    /// Arity and order of the result of a binary operation. Constants
    /// broadcast; two non-constant operands must share their variable count.
    fn binary_layout(&self, other: &Jet) -> (usize, u8) {
        match (self.vars, other.vars) {
            (0, 0) => (0, MAX_ORDER),
            (0, _) => (other.vars, other.order),
            (_, 0) => (self.vars, self.order),
            (a, b) => {
                assert_eq!(a, b, "jet arity mismatch: {a} vs {b}");
                (a, self.order.min(other.order))
            }
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (vars, order) = self.binary_layout(other);
        if vars == 0 {
            return Jet::constant(f(self.c[0], other.c[0]));
        }
        let mut out = Jet::zero_jet(vars, order);
        out.c[0] = f(self.value(), other.value());
        if order >= 1 {
            for i in 0..vars {
                out.set_g(i, f(self.g(i), other.g(i)));
            }
        }
        if order >= 2 {
            for i in 0..vars {
                for j in i..vars {
                    out.set_h(i, j, f(self.h(i, j), other.h(i, j)));
                }
            }
        }
        if order >= 3 {
            for i in 0..vars {
                for j in i..vars {
                    for k in j..vars {
                        out.set_t(i, j, k, f(self.t(i, j, k), other.t(i, j, k)));
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let (vars, order) = self.binary_layout(other);
        if vars == 0 {
            return Jet::constant(self.c[0] * other.c[0]);
        }
        let (a, b) = (self, other);
        let mut out = Jet::zero_jet(vars, order);
        out.c[0] = a.value() * b.value();
        if order >= 1 {
            for i in 0..vars {
                out.set_g(i, a.g(i) * b.value() + a.value() * b.g(i));
            }
        }
        if order >= 2 {
            for i in 0..vars {
                for j in i..vars {
                    out.set_h(
                        i,
                        j,
                        a.h(i, j) * b.value()
                            + a.g(i) * b.g(j)
                            + a.g(j) * b.g(i)
                            + a.value() * b.h(i, j),
                    );
                }
            }
        }
        if order >= 3 {
            for i in 0..vars {
                for j in i..vars {
                    for k in j..vars {
                        out.set_t(
                            i,
                            j,
                            k,
                            a.t(i, j, k) * b.value()
                                + a.h(i, j) * b.g(k)
                                + a.h(i, k) * b.g(j)
                                + a.h(j, k) * b.g(i)
                                + a.g(i) * b.h(j, k)
                                + a.g(j) * b.h(i, k)
                                + a.g(k) * b.h(i, j)
                                + a.value() * b.t(i, j, k),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.c {
            *c *= k;
        }
        out
    }

    /// Composition with an analytic function h given its derivatives at the
    /// jet value: `d = [h(v), h'(v), h''(v), h'''(v)]` (Faà di Bruno to
    /// order 3).
    pub fn compose(&self, d: [f64; 4]) -> Jet {
        if self.vars == 0 {
            return Jet::constant(d[0]);
        }
        let (vars, order) = (self.vars, self.order);
        let f = self;
        let mut out = Jet::zero_jet(vars, order);
        out.c[0] = d[0];
        if order >= 1 {
            for i in 0..vars {
                out.set_g(i, d[1] * f.g(i));
            }
        }
        if order >= 2 {
            for i in 0..vars {
                for j in i..vars {
                    out.set_h(i, j, d[2] * f.g(i) * f.g(j) + d[1] * f.h(i, j));
                }
            }
        }
        if order >= 3 {
            for i in 0..vars {
                for j in i..vars {
                    for k in j..vars {
                        out.set_t(
                            i,
                            j,
                            k,
                            d[3] * f.g(i) * f.g(j) * f.g(k)
                                + d[2]
                                    * (f.h(i, j) * f.g(k)
                                        + f.h(i, k) * f.g(j)
                                        + f.h(j, k) * f.g(i))
                                + d[1] * f.t(i, j, k),
                        );
                    }
                }
            }
        }
        out
    }

    /// Partial derivative with respect to chart variable p: an order-(K-1)
    /// jet. Panics on exhausted jets; callers gate on the declared order
    /// requirement of each operator.
    pub fn partial(&self, p: usize) -> Jet {
        if self.vars == 0 {
            return Jet::constant(0.0);
        }
        assert!(
            self.order >= 1,
            "jet order exhausted: cannot differentiate an order-0 jet"
        );
        let vars = self.vars;
        let order = self.order - 1;
        let mut out = Jet::zero_jet(vars, order);
        out.c[0] = self.g(p);
        if order >= 1 {
            for i in 0..vars {
                out.set_g(i, self.h(p, i));
            }
        }
        if order >= 2 {
            for i in 0..vars {
                for j in i..vars {
                    out.set_h(i, j, self.t(p, i, j));
                }
            }
        }
        out
    }

    /// Drop derivative information above `order` (no-op if already lower).
    pub fn truncate(&self, order: u8) -> Jet {
        if self.vars == 0 || self.order <= order {
            return self.clone();
        }
        let mut out = Jet::zero_jet(self.vars, order);
        let n = out.c.len();
        out.c.copy_from_slice(&self.c[..n]);
        out
    }

    pub fn recip(&self) -> Jet {
        let v = self.value();
        self.compose([
            1.0 / v,
            -1.0 / (v * v),
            2.0 / (v * v * v),
            -6.0 / (v * v * v * v),
        ])
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self.mul(&other.recip())
    }

    pub fn sqrt(&self) -> Jet {
        let v = self.value();
        let s = v.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Jet {
        let v = self.value();
        self.compose([v.ln(), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Jet {
        // tan' = 1 + tan^2, differentiated twice more.
        let t = self.value().tan();
        let d1 = 1.0 + t * t;
        let d2 = 2.0 * t * d1;
        let d3 = 2.0 * d1 * d1 + 2.0 * t * d2;
        self.compose([t, d1, d2, d3])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([c, s, c, s])
    }

    pub fn tanh(&self) -> Jet {
        let t = self.value().tanh();
        let d1 = 1.0 - t * t;
        let d2 = -2.0 * t * d1;
        let d3 = -2.0 * d1 * d1 - 2.0 * t * d2;
        self.compose([t, d1, d2, d3])
    }

    pub fn powi(&self, n: i32) -> Jet {
        let v = self.value();
        let d = |k: i32| -> f64 {
            // n (n-1) ... (n-k+1) v^(n-k)
            let mut coef = 1.0;
            for j in 0..k {
                coef *= (n - j) as f64;
            }
            if coef == 0.0 {
                0.0
            } else {
                coef * v.powi(n - k)
            }
        };
        self.compose([d(0), d(1), d(2), d(3)])
    }

    pub fn powf(&self, p: f64) -> Jet {
        let v = self.value();
        let d = |k: u32| -> f64 {
            let mut coef = 1.0;
            for j in 0..k {
                coef *= p - j as f64;
            }
            coef * v.powf(p - k as f64)
        };
        self.compose([d(0), d(1), d(2), d(3)])
    }
}

/// Scalar ring with the analytic operations the frame machinery needs.
/// Implemented by `f64` (plain evaluation, e.g. in oracles) and by [`Jet`]
/// (exact differentiation), so the Clifford kernels are written once.
pub trait Scalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, k: f64) -> Self;
    fn sqrt(&self) -> Self;
    /// Underlying point value (the 0-th coefficient for jets).
    fn value(&self) -> f64;
    /// Exact additive-zero test (all coefficients zero for jets). Used to
    /// skip inert terms in products; never a tolerance check.
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Jet {
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn one() -> Self {
        Jet::constant(1.0)
    }
    fn from_f64(x: f64) -> Self {
        Jet::constant(x)
    }
    fn add(&self, other: &Self) -> Self {
        Jet::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Jet::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Jet::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        Jet::div(self, other)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn scale(&self, k: f64) -> Self {
        Jet::scale(self, k)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }
}
