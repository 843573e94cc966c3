//! Exact univariate polynomial arithmetic over quadratic fields Q(√D)
//! and the polynomial Fermat equation X^a + Y^b = Z^c.
//!
//! For a triple (a, b, c) with χ(a,b,c) = 1/a + 1/b + 1/c − 1 > 0, the
//! universal covering θ of the orbifold with ν(1)=a, ν(∞)=b, ν(0)=c is
//! uniform, giving coprime polynomials P, Q, R with θ = R^c/P^b,
//! θ − 1 = Q^a/P^b, hence Q^a + P^b = R^c, and (after a Möbius
//! normalization making ∞ non-critical) c·deg R = b·deg P = a·deg Q = n
//! where n = deg θ. Every polynomial solution of X^a + Y^b = Z^c arises
//! from such covering data by the substitution z = U/V with coprime U, V:
//!
//! ```text
//! X = α·V^{n/a}·Q(U/V),  Y = β·V^{n/b}·P(U/V),  Z = γ·V^{n/c}·R(U/V)
//! ```
//!
//! with scalars satisfying α^n = β^n = γ^n ([`build_solution`]).

use crate::orbifold::triple_invariants;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors from field/polynomial arithmetic and covering-data handling.
#[derive(Debug, Error)]
pub enum HalphenError {
    /// Two operands live in Q(√D) for different D.
    #[error("mixed fields: sqrt({0}) vs sqrt({1})")]
    MixedFields(i64, i64),
    /// Division by the zero polynomial or a zero scalar.
    #[error("division by zero")]
    DivisionByZero,
    /// Malformed covering-data text.
    #[error("syntax error: {0}")]
    Syntax(String),
    /// A precondition of [`build_solution`] failed.
    #[error("invalid construction input: {0}")]
    BadInput(String),
}

/// An element r + s√D of Q(√D). With D = 1 the element is rational
/// (s is folded into r on construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadScalar {
    pub r: BigRational,
    pub s: BigRational,
}

impl QuadScalar {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        QuadScalar { r, s }
    }

    pub fn from_int(v: i64) -> Self {
        QuadScalar {
            r: BigRational::from_integer(BigInt::from(v)),
            s: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    fn canon(mut self, d: i64) -> Self {
        // Q(√1) is just Q: fold the radical part into the rational part.
        if d == 1 && !self.s.is_zero() {
            self.r += std::mem::take(&mut self.s);
        }
        self
    }

    fn add(&self, other: &Self) -> Self {
        QuadScalar {
            r: &self.r + &other.r,
            s: &self.s + &other.s,
        }
    }

    fn mul(&self, other: &Self, d: i64) -> Self {
        let d = BigRational::from_integer(BigInt::from(d));
        QuadScalar {
            r: &self.r * &other.r + &d * &self.s * &other.s,
            s: &self.r * &other.s + &self.s * &other.r,
        }
    }

    /// Multiplicative inverse in Q(√D); `D` must be square-free and ≠ 1
    /// unless `s = 0`, so the norm r² − D·s² is nonzero for nonzero input.
    fn inv(&self, d: i64) -> Result<Self, HalphenError> {
        if self.is_zero() {
            return Err(HalphenError::DivisionByZero);
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        let norm = &self.r * &self.r - &dd * &self.s * &self.s;
        if norm.is_zero() {
            return Err(HalphenError::DivisionByZero);
        }
        Ok(QuadScalar {
            r: &self.r / &norm,
            s: -&self.s / &norm,
        })
    }
}

fn fmt_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Renders `r + s√D` in the covering-file coefficient syntax.
fn fmt_scalar(c: &QuadScalar, d: i64) -> String {
    if c.s.is_zero() {
        fmt_rational(&c.r)
    } else if c.s.is_negative() {
        format!("{}-{}√{}", fmt_rational(&c.r), fmt_rational(&-&c.s), d)
    } else {
        format!("{}+{}√{}", fmt_rational(&c.r), fmt_rational(&c.s), d)
    }
}

fn parse_rational(tok: &str) -> Result<BigRational, HalphenError> {
    BigRational::from_str(tok.trim())
        .map_err(|_| HalphenError::Syntax(format!("bad rational '{tok}'")))
}

/// Parses `r`, `r+s√D`, or `r-s√D`.
fn parse_scalar(tok: &str, d: i64) -> Result<QuadScalar, HalphenError> {
    let tok = tok.trim();
    match tok.find('√') {
        None => Ok(QuadScalar::new(parse_rational(tok)?, BigRational::zero())),
        Some(pos) => {
            let radicand: i64 = tok[pos + '√'.len_utf8()..]
                .trim()
                .parse()
                .map_err(|_| HalphenError::Syntax(format!("bad radicand in '{tok}'")))?;
            if radicand != d {
                return Err(HalphenError::MixedFields(d, radicand));
            }
            let mantissa = tok[..pos].trim();
            // Split r and s at the last top-level + or - (not a leading sign).
            let split = mantissa
                .char_indices()
                .skip(1)
                .filter(|&(i, ch)| {
                    (ch == '+' || ch == '-')
                        && !matches!(mantissa.as_bytes()[i - 1], b'+' | b'-' | b'/' | b'e')
                })
                .map(|(i, _)| i)
                .last();
            let (r_tok, s_tok) = match split {
                Some(i) => (&mantissa[..i], &mantissa[i..]),
                None => ("0", mantissa),
            };
            let s_tok = s_tok.strip_suffix('*').unwrap_or(s_tok);
            let s = match s_tok {
                "+" | "" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rational(s_tok)?,
            };
            Ok(QuadScalar::new(parse_rational(r_tok)?, s))
        }
    }
}

/// A polynomial over Q(√D), coefficients constant-term first.
///
/// The zero polynomial has an empty coefficient list; otherwise the
/// leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPoly {
    d: i64,
    coeffs: Vec<QuadScalar>,
}

impl QuadPoly {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(d: i64, coeffs: Vec<QuadScalar>) -> Self {
        let mut coeffs: Vec<QuadScalar> = coeffs.into_iter().map(|c| c.canon(d)).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QuadPoly { d, coeffs }
    }

    /// Polynomial with integer coefficients, constant term first.
    pub fn from_ints(d: i64, coeffs: &[i64]) -> Self {
        Self::new(d, coeffs.iter().map(|&v| QuadScalar::from_int(v)).collect())
    }

    /// Coefficients `(r, s)` with `r + s√D` as integers, constant first.
    pub fn from_int_pairs(d: i64, coeffs: &[(i64, i64)]) -> Self {
        Self::new(
            d,
            coeffs
                .iter()
                .map(|&(r, s)| {
                    QuadScalar::new(
                        BigRational::from_integer(BigInt::from(r)),
                        BigRational::from_integer(BigInt::from(s)),
                    )
                })
                .collect(),
        )
    }

    pub fn zero(d: i64) -> Self {
        QuadPoly { d, coeffs: vec![] }
    }

    pub fn one(d: i64) -> Self {
        Self::from_ints(d, &[1])
    }

    /// The monomial z.
    pub fn variable(d: i64) -> Self {
        Self::from_ints(d, &[0, 1])
    }

    pub fn constant(d: i64, c: QuadScalar) -> Self {
        Self::new(d, vec![c])
    }

    pub fn field(&self) -> i64 {
        self.d
    }

    pub fn coeffs(&self) -> &[QuadScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&QuadScalar> {
        self.coeffs.last()
    }

    fn check_field(&self, other: &Self) -> Result<i64, HalphenError> {
        if self.d != other.d {
            Err(HalphenError::MixedFields(self.d, other.d))
        } else {
            Ok(self.d)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HalphenError> {
        let d = self.check_field(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = QuadScalar::new(BigRational::zero(), BigRational::zero());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&zero)
                    .add(other.coeffs.get(i).unwrap_or(&zero))
            })
            .collect();
        Ok(Self::new(d, coeffs))
    }

    pub fn neg(&self) -> Self {
        QuadPoly {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| QuadScalar::new(-&c.r, -&c.s))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HalphenError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, HalphenError> {
        let d = self.check_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(d));
        }
        let zero = QuadScalar::new(BigRational::zero(), BigRational::zero());
        let mut coeffs = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b, d));
            }
        }
        Ok(Self::new(d, coeffs))
    }

    pub fn scale(&self, c: &QuadScalar) -> Self {
        let c = c.clone().canon(self.d);
        QuadPoly::new(
            self.d,
            self.coeffs.iter().map(|x| x.mul(&c, self.d)).collect(),
        )
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Composition `self(other)` by Horner's rule.
    pub fn compose(&self, other: &Self) -> Result<Self, HalphenError> {
        let d = self.check_field(other)?;
        let mut acc = Self::zero(d);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other)?.add(&Self::constant(d, c.clone()))?;
        }
        Ok(acc)
    }

    /// Euclidean remainder of `self` modulo `other` (nonzero).
    fn rem(&self, other: &Self) -> Result<Self, HalphenError> {
        let d = self.check_field(other)?;
        if other.is_zero() {
            return Err(HalphenError::DivisionByZero);
        }
        let mut r = self.clone();
        let lead_inv = other.leading().unwrap().inv(d)?;
        let deg_o = other.degree().unwrap();
        while let Some(deg_r) = r.degree() {
            if deg_r < deg_o {
                break;
            }
            let factor = r.leading().unwrap().mul(&lead_inv, d);
            let shift = deg_r - deg_o;
            // r -= factor * z^shift * other
            let mut sub_coeffs =
                vec![QuadScalar::new(BigRational::zero(), BigRational::zero()); shift];
            sub_coeffs.extend(other.coeffs.iter().map(|c| c.mul(&factor, d)));
            r = r.sub(&QuadPoly::new(d, sub_coeffs))?;
        }
        Ok(r)
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Result<Self, HalphenError> {
        let d = self.check_field(other)?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let inv = a.leading().unwrap().inv(d)?;
        Ok(a.scale(&inv))
    }
}

impl fmt::Display for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| fmt_scalar(c, self.d))
            .collect();
        write!(f, "{}", terms.join(", "))
    }
}

fn coprime(a: &QuadPoly, b: &QuadPoly) -> Result<bool, HalphenError> {
    Ok(a.gcd(b)?.degree() == Some(0))
}

/// True iff `X^a + Y^b = Z^c` holds identically with `X, Y, Z` pairwise
/// coprime and non-constant.
pub fn verify_fermat(
    x: &QuadPoly,
    y: &QuadPoly,
    z: &QuadPoly,
    a: u64,
    b: u64,
    c: u64,
) -> Result<bool, HalphenError> {
    x.check_field(y)?;
    x.check_field(z)?;
    if x.is_constant() || y.is_constant() || z.is_constant() {
        return Ok(false);
    }
    if !(coprime(x, y)? && coprime(x, z)? && coprime(y, z)?) {
        return Ok(false);
    }
    Ok(x.pow(a).add(&y.pow(b))?.sub(&z.pow(c))?.is_zero())
}

/// True iff `(P, Q, R)` is valid covering data for the triple `(a, b, c)`:
/// `Q^a + P^b = R^c`, pairwise coprime, and
/// `c·deg R = b·deg P = a·deg Q = n(a,b,c)`.
pub fn verify_covering_data(
    p: &QuadPoly,
    q: &QuadPoly,
    r: &QuadPoly,
    a: u64,
    b: u64,
    c: u64,
) -> Result<bool, HalphenError> {
    p.check_field(q)?;
    p.check_field(r)?;
    if a < 2 || b < 2 || c < 2 {
        return Ok(false);
    }
    let n = match triple_invariants(a, b, c).n_abc {
        Some(n) => n,
        None => return Ok(false),
    };
    let deg_ok = |poly: &QuadPoly, m: u64| poly.degree().map(|deg| deg as u64 * m) == Some(n);
    if !(deg_ok(q, a) && deg_ok(p, b) && deg_ok(r, c)) {
        return Ok(false);
    }
    if !(coprime(p, q)? && coprime(p, r)? && coprime(q, r)?) {
        return Ok(false);
    }
    Ok(q.pow(a).add(&p.pow(b))?.sub(&r.pow(c))?.is_zero())
}

/// Homogenized substitution `scalar · V^m · f(U/V) = scalar · Σ fᵢ Uⁱ V^{m−i}`.
fn substitute(
    f: &QuadPoly,
    u: &QuadPoly,
    v: &QuadPoly,
    m: u64,
    scalar: &QuadScalar,
) -> Result<QuadPoly, HalphenError> {
    let d = f.field();
    let mut acc = QuadPoly::zero(d);
    for (i, coeff) in f.coeffs().iter().enumerate() {
        let term = u
            .pow(i as u64)
            .mul(&v.pow(m - i as u64))?
            .scale(coeff);
        acc = acc.add(&term)?;
    }
    Ok(acc.scale(scalar))
}

/// Builds the polynomial Fermat solution
/// `X = α·V^{n/a}·Q(U/V)`, `Y = β·V^{n/b}·P(U/V)`, `Z = γ·V^{n/c}·R(U/V)`
/// from covering data and a coprime substitution pair `(U, V)`.
///
/// Requires `verify_covering_data(P,Q,R,a,b,c)`, `gcd(U,V)` constant with
/// `U, V` not both constant, and `α^n = β^n = γ^n` for nonzero scalars.
#[allow(clippy::too_many_arguments)]
pub fn build_solution(
    p: &QuadPoly,
    q: &QuadPoly,
    r: &QuadPoly,
    u: &QuadPoly,
    v: &QuadPoly,
    alpha: &QuadScalar,
    beta: &QuadScalar,
    gamma: &QuadScalar,
    a: u64,
    b: u64,
    c: u64,
) -> Result<(QuadPoly, QuadPoly, QuadPoly), HalphenError> {
    if !verify_covering_data(p, q, r, a, b, c)? {
        return Err(HalphenError::BadInput(
            "covering data fails verification".into(),
        ));
    }
    let d = p.field();
    u.check_field(v)?;
    u.check_field(p)?;
    if u.is_zero() || v.is_zero() {
        return Err(HalphenError::BadInput("U and V must be nonzero".into()));
    }
    if u.is_constant() && v.is_constant() {
        return Err(HalphenError::BadInput(
            "U and V must not both be constant".into(),
        ));
    }
    if u.gcd(v)?.degree() != Some(0) {
        return Err(HalphenError::BadInput("U and V must be coprime".into()));
    }
    let n = triple_invariants(a, b, c)
        .n_abc
        .expect("checked by verify_covering_data");
    for (name, s) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if s.clone().canon(d).is_zero() {
            return Err(HalphenError::BadInput(format!("{name} must be nonzero")));
        }
    }
    let pow_n = |s: &QuadScalar| {
        QuadPoly::constant(d, s.clone())
            .pow(n)
            .coeffs()
            .first()
            .cloned()
            .unwrap()
    };
    let (an, bn, gn) = (pow_n(alpha), pow_n(beta), pow_n(gamma));
    if an != bn || bn != gn {
        return Err(HalphenError::BadInput(
            "scalars must satisfy alpha^n = beta^n = gamma^n".into(),
        ));
    }
    let x = substitute(q, u, v, n / a, alpha)?;
    let y = substitute(p, u, v, n / b, beta)?;
    let z = substitute(r, u, v, n / c, gamma)?;
    Ok((x, y, z))
}

/// Covering data `(P, Q, R)` for a triple `(a, b, c)` over Q(√D).
#[derive(Debug, Clone)]
pub struct CoveringData {
    pub d: i64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub p: QuadPoly,
    pub q: QuadPoly,
    pub r: QuadPoly,
}

impl CoveringData {
    /// Runs [`verify_covering_data`] on the stored polynomials.
    pub fn verify(&self) -> Result<bool, HalphenError> {
        verify_covering_data(&self.p, &self.q, &self.r, self.a, self.b, self.c)
    }
}

/// Dihedral covering data for the triple `(2, 2, d)`, `d ≥ 2`: with
/// `u = (3+4i)/5` (a unit of modulus one), `Q + iP = u·(z+i)^d` gives
/// rational polynomials `P, Q` of degree `d` with `Q² + P² = (z²+1)^d`.
pub fn dihedral_covering(deg: u64) -> CoveringData {
    assert!(deg >= 2, "dihedral parameter must be at least 2");
    // Work in Q(i) (D = −1): g = (3+4i)/5 · (z+i)^d, then Q = Re g, P = Im g.
    let five = BigRational::from_integer(BigInt::from(5));
    let unit = QuadScalar::new(
        BigRational::from_integer(BigInt::from(3)) / &five,
        BigRational::from_integer(BigInt::from(4)) / &five,
    );
    let g = QuadPoly::from_int_pairs(-1, &[(0, 1), (1, 0)])
        .pow(deg)
        .scale(&unit);
    let re = QuadPoly::new(
        1,
        g.coeffs()
            .iter()
            .map(|c| QuadScalar::new(c.r.clone(), BigRational::zero()))
            .collect(),
    );
    let im = QuadPoly::new(
        1,
        g.coeffs()
            .iter()
            .map(|c| QuadScalar::new(c.s.clone(), BigRational::zero()))
            .collect(),
    );
    CoveringData {
        d: 1,
        a: 2,
        b: 2,
        c: deg,
        p: im,
        q: re,
        r: QuadPoly::from_ints(1, &[1, 0, 1]),
    }
}

/// The classical tetrahedral covering data over Q(√−3) for the triple
/// `(a, b, c) = (3, 2, 3)`, `n = 12`: derived from
/// `Φ³ − Ψ³ = 12√−3·W²` with `Φ = z⁴ + 2√−3 z² + 1`,
/// `Ψ = z⁴ − 2√−3 z² + 1`, `W = z(z⁴ − 1)`, after the Möbius substitution
/// `z ↦ (2z+1)/z` (making ∞ non-critical) and scaling by `−√−3`.
pub fn tetrahedral_covering() -> CoveringData {
    CoveringData {
        d: -3,
        a: 3,
        b: 2,
        c: 3,
        p: QuadPoly::from_int_pairs(
            -3,
            &[(0, 0), (0, 6), (0, 60), (0, 240), (0, 480), (0, 474), (0, 180)],
        ),
        q: QuadPoly::from_int_pairs(
            -3,
            &[(0, -1), (0, -8), (-6, -24), (-24, -32), (-24, -17)],
        ),
        r: QuadPoly::from_int_pairs(
            -3,
            &[(0, -1), (0, -8), (6, -24), (24, -32), (24, -17)],
        ),
    }
}

/// Parses the covering-data file format:
///
/// ```text
/// # comment
/// D=-3 a=3 b=2 c=3
/// P: 0, 6√-3, 60√-3
/// Q: 0-1√-3, ...
/// R: ...
/// ```
///
/// Coefficients are `r` or `r±s√D`, constant term first.
pub fn parse_covering(text: &str) -> Result<CoveringData, HalphenError> {
    let mut header: Option<(i64, u64, u64, u64)> = None;
    let mut polys: [Option<QuadPoly>; 3] = [None, None, None];
    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if header.is_none() {
            let mut d = None;
            let mut abc = [None; 3];
            for field in line.split_whitespace() {
                let (key, val) = field
                    .split_once('=')
                    .ok_or_else(|| HalphenError::Syntax(format!("bad header field '{field}'")))?;
                match key {
                    "D" => {
                        d = Some(val.parse::<i64>().map_err(|_| {
                            HalphenError::Syntax(format!("bad D value '{val}'"))
                        })?)
                    }
                    "a" | "b" | "c" => {
                        let idx = (key.as_bytes()[0] - b'a') as usize;
                        abc[idx] = Some(val.parse::<u64>().map_err(|_| {
                            HalphenError::Syntax(format!("bad {key} value '{val}'"))
                        })?);
                    }
                    other => {
                        return Err(HalphenError::Syntax(format!("unknown header key '{other}'")))
                    }
                }
            }
            match (d, abc[0], abc[1], abc[2]) {
                (Some(d), Some(a), Some(b), Some(c)) => header = Some((d, a, b, c)),
                _ => return Err(HalphenError::Syntax("incomplete header".into())),
            }
            continue;
        }
        let (d, ..) = header.unwrap();
        let (tag, rest) = line
            .split_once(':')
            .ok_or_else(|| HalphenError::Syntax(format!("expected 'P:', 'Q:' or 'R:': '{line}'")))?;
        let slot = match tag.trim() {
            "P" => 0,
            "Q" => 1,
            "R" => 2,
            other => return Err(HalphenError::Syntax(format!("unknown tag '{other}'"))),
        };
        if polys[slot].is_some() {
            return Err(HalphenError::Syntax(format!("duplicate '{}' line", tag.trim())));
        }
        let coeffs: Result<Vec<QuadScalar>, _> =
            rest.split(',').map(|tok| parse_scalar(tok, d)).collect();
        polys[slot] = Some(QuadPoly::new(d, coeffs?));
    }
    let (d, a, b, c) = header.ok_or_else(|| HalphenError::Syntax("missing header".into()))?;
    let [p, q, r] = polys;
    match (p, q, r) {
        (Some(p), Some(q), Some(r)) => Ok(CoveringData { d, a, b, c, p, q, r }),
        _ => Err(HalphenError::Syntax("missing P, Q or R line".into())),
    }
}

/// Renders covering data in the format accepted by [`parse_covering`].
pub fn format_covering(data: &CoveringData) -> String {
    format!(
        "D={} a={} b={} c={}\nP: {}\nQ: {}\nR: {}\n",
        data.d, data.a, data.b, data.c, data.p, data.q, data.r
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(v: i64) -> QuadScalar {
        QuadScalar::from_int(v)
    }

    #[test]
    fn gcd_example() {
        let a = QuadPoly::from_ints(1, &[-1, 0, 1]); // z² − 1
        let b = QuadPoly::from_ints(1, &[-1, 1]); // z − 1
        assert_eq!(a.gcd(&b).unwrap(), b);
    }

    #[test]
    fn conjugate_product() {
        // (z + √−3)(z − √−3) = z² + 3
        let a = QuadPoly::from_int_pairs(-3, &[(0, 1), (1, 0)]);
        let b = QuadPoly::from_int_pairs(-3, &[(0, -1), (1, 0)]);
        assert_eq!(a.mul(&b).unwrap(), QuadPoly::from_ints(-3, &[3, 0, 1]));
    }

    #[test]
    fn compose_example() {
        let sq = QuadPoly::from_ints(1, &[0, 0, 1]);
        let lin = QuadPoly::from_ints(1, &[1, 1]);
        assert_eq!(
            sq.compose(&lin).unwrap(),
            QuadPoly::from_ints(1, &[1, 2, 1])
        );
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = QuadPoly::from_ints(-1, &[1, 1]);
        let b = QuadPoly::from_ints(-3, &[1, 1]);
        assert!(matches!(
            a.add(&b),
            Err(HalphenError::MixedFields(-1, -3))
        ));
    }

    #[test]
    fn pythagorean_fermat() {
        let x = QuadPoly::from_ints(1, &[-1, 0, 1]);
        let y = QuadPoly::from_ints(1, &[0, 2]);
        let z = QuadPoly::from_ints(1, &[1, 0, 1]);
        assert!(verify_fermat(&x, &y, &z, 2, 2, 2).unwrap());
    }

    #[test]
    fn constants_fail_fermat() {
        let one = QuadPoly::one(1);
        assert!(!verify_fermat(&one, &one, &one, 2, 3, 5).unwrap());
    }

    #[test]
    fn non_coprime_fail_fermat() {
        // (2z²)² + ... share the factor z with Y; use X = z², Y = z³.
        let x = QuadPoly::from_ints(1, &[0, 0, 1]);
        let y = QuadPoly::from_ints(1, &[0, 0, 0, 1]);
        let z = x.pow(2).add(&y.pow(2)).unwrap();
        // Not even a c-th power; the coprimality check fires first.
        assert!(!verify_fermat(&x, &y, &z, 2, 2, 1).unwrap_or(false));
    }

    #[test]
    fn dihedral_data_verify() {
        for deg in 2..=20 {
            let data = dihedral_covering(deg);
            assert!(data.verify().unwrap(), "dihedral d={deg} fails");
        }
    }

    #[test]
    fn tetrahedral_data_verify() {
        assert!(tetrahedral_covering().verify().unwrap());
    }

    #[test]
    fn degree_mismatch_detected() {
        let mut data = dihedral_covering(3);
        data.r = QuadPoly::from_ints(1, &[1, 0, 0, 1]); // wrong degree
        assert!(!data.verify().unwrap());
    }

    #[test]
    fn build_solution_identity_substitution() {
        let data = dihedral_covering(4);
        let u = QuadPoly::variable(1);
        let v = QuadPoly::one(1);
        let (x, y, z) = build_solution(
            &data.p, &data.q, &data.r, &u, &v,
            &rat(1), &rat(1), &rat(1),
            data.a, data.b, data.c,
        )
        .unwrap();
        assert_eq!(x, data.q);
        assert_eq!(y, data.p);
        assert_eq!(z, data.r);
        assert!(verify_fermat(&x, &y, &z, data.a, data.b, data.c).unwrap());
    }

    #[test]
    fn build_solution_degree_doubling() {
        let data = dihedral_covering(3);
        let u = QuadPoly::from_ints(1, &[1, 0, 1]); // z² + 1
        let v = QuadPoly::variable(1);
        let n = 2 * 3;
        let (x, y, z) = build_solution(
            &data.p, &data.q, &data.r, &u, &v,
            &rat(1), &rat(1), &rat(1),
            data.a, data.b, data.c,
        )
        .unwrap();
        assert!(verify_fermat(&x, &y, &z, data.a, data.b, data.c).unwrap());
        // deg X = (n/a)·max(deg U, deg V)
        assert_eq!(x.degree(), Some((n / data.a) as usize * 2));
        assert_eq!(y.degree(), Some((n / data.b) as usize * 2));
        assert_eq!(z.degree(), Some((n / data.c) as usize * 2));
    }

    #[test]
    fn build_solution_tetrahedral() {
        let data = tetrahedral_covering();
        let u = QuadPoly::from_ints(-3, &[1, 2, 0, 1]);
        let v = QuadPoly::from_ints(-3, &[0, 1, 1]);
        assert_eq!(u.gcd(&v).unwrap().degree(), Some(0));
        let (x, y, z) = build_solution(
            &data.p, &data.q, &data.r, &u, &v,
            &rat(1), &rat(1), &rat(1),
            data.a, data.b, data.c,
        )
        .unwrap();
        assert!(verify_fermat(&x, &y, &z, data.a, data.b, data.c).unwrap());
    }

    #[test]
    fn build_solution_rejects_bad_scalars() {
        let data = dihedral_covering(2);
        let err = build_solution(
            &data.p, &data.q, &data.r,
            &QuadPoly::variable(1), &QuadPoly::one(1),
            &rat(1), &rat(2), &rat(1),
            data.a, data.b, data.c,
        )
        .unwrap_err();
        assert!(matches!(err, HalphenError::BadInput(_)));
    }

    #[test]
    fn build_solution_rejects_non_coprime_uv() {
        let data = dihedral_covering(2);
        let u = QuadPoly::from_ints(1, &[0, 0, 1]);
        let v = QuadPoly::from_ints(1, &[0, 1]);
        assert!(matches!(
            build_solution(
                &data.p, &data.q, &data.r, &u, &v,
                &rat(1), &rat(1), &rat(1),
                data.a, data.b, data.c,
            ),
            Err(HalphenError::BadInput(_))
        ));
    }

    #[test]
    fn fermat_scaling_invariance() {
        // (X,Y,Z) → (λ^{n/a}X, λ^{n/b}Y, λ^{n/c}Z) preserves the identity.
        let data = dihedral_covering(3);
        let n = 6;
        let lambda = BigRational::new(BigInt::from(3), BigInt::from(2));
        let scale = |p: &QuadPoly, e: u64| {
            let mut c = QuadScalar::new(BigRational::one(), BigRational::zero());
            for _ in 0..e {
                c = QuadScalar::new(&c.r * &lambda, BigRational::zero());
            }
            p.scale(&c)
        };
        let x = scale(&data.q, n / data.a);
        let y = scale(&data.p, n / data.b);
        let z = scale(&data.r, n / data.c);
        assert!(verify_fermat(&x, &y, &z, data.a, data.b, data.c).unwrap());
    }

    #[test]
    fn covering_file_round_trip() {
        for data in [dihedral_covering(5), tetrahedral_covering()] {
            let text = format_covering(&data);
            let parsed = parse_covering(&text).unwrap();
            assert_eq!(parsed.d, data.d);
            assert_eq!((parsed.a, parsed.b, parsed.c), (data.a, data.b, data.c));
            assert_eq!(parsed.p, data.p);
            assert_eq!(parsed.q, data.q);
            assert_eq!(parsed.r, data.r);
            assert!(parsed.verify().unwrap());
        }
    }

    #[test]
    fn parse_scalar_forms() {
        assert_eq!(parse_scalar("3/5", 1).unwrap(), {
            QuadScalar::new(
                BigRational::new(BigInt::from(3), BigInt::from(5)),
                BigRational::zero(),
            )
        });
        let s = parse_scalar("-2+1√-3", -3).unwrap();
        assert_eq!(s.r, BigRational::from_integer(BigInt::from(-2)));
        assert_eq!(s.s, BigRational::from_integer(BigInt::from(1)));
        let s = parse_scalar("0-7/2√-3", -3).unwrap();
        assert_eq!(s.s, BigRational::new(BigInt::from(-7), BigInt::from(2)));
        assert!(matches!(
            parse_scalar("1+1√-1", -3),
            Err(HalphenError::MixedFields(-3, -1))
        ));
    }

    #[test]
    fn parse_covering_rejects_garbage() {
        assert!(parse_covering("").is_err());
        assert!(parse_covering("D=1 a=2 b=2\nP: 1\nQ: 1\nR: 1\n").is_err());
        assert!(parse_covering("D=1 a=2 b=2 c=2\nP: 1\nQ: x\nR: 1\n").is_err());
    }
}
