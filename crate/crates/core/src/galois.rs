//! Finite-field and modulo-N ring arithmetic on integer labels.
//!
//! An element of GF(p^m) is identified with the integer whose p-ary digits
//! are the coefficients of its polynomial in the power basis `1, x, x², …`
//! modulo a fixed monic irreducible polynomial. With this labeling 0 and 1
//! are the additive and multiplicative identities and addition is digitwise
//! addition mod p. All operations are table lookups; tables are filled once
//! when the context is built.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Galois,
    Modular,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Galois => f.write_str("galois"),
            Mode::Modular => f.write_str("modular"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "galois" => Ok(Mode::Galois),
            "modular" => Ok(Mode::Modular),
            other => Err(format!(
                "unknown mode `{other}` (expected galois or modular)"
            )),
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime divisor of `n >= 2`.
pub fn smallest_prime_factor(n: usize) -> usize {
    (2..=n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

/// Writes `n` as `p^m` when it is a prime power.
pub fn prime_power(n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    let p = smallest_prime_factor(n);
    let (mut rest, mut m) = (n, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Dense polynomials over GF(p), coefficients low-to-high.
mod poly {
    pub fn trim(mut a: Vec<usize>) -> Vec<usize> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    pub fn mul(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    /// Remainder of `a` modulo the monic polynomial `modulus`.
    pub fn rem_monic(a: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
        let deg = modulus.len() - 1;
        let mut r = a.to_vec();
        if r.len() <= deg {
            r.resize(deg.max(1), 0);
            return r;
        }
        for top in (deg..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            for (k, &mk) in modulus.iter().enumerate() {
                let idx = top - deg + k;
                r[idx] = (r[idx] + p - (c * mk) % p) % p;
            }
        }
        r.truncate(deg.max(1));
        r
    }

    /// Monic polynomial of the given degree whose lower coefficients are the
    /// p-ary digits of `code`.
    pub fn monic_from_code(code: usize, degree: usize, p: usize) -> Vec<usize> {
        let mut c = code;
        let mut out = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            out.push(c % p);
            c /= p;
        }
        out.push(1);
        out
    }

    pub fn is_irreducible(f: &[usize], p: usize) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            for code in 0..p.pow(d as u32) {
                let g = monic_from_code(code, d, p);
                if trim(rem_monic(f, &g, p)).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    /// Lexicographically smallest monic irreducible of degree `m`, ordered by
    /// the integer whose p-ary digits are the lower coefficients.
    pub fn smallest_irreducible(p: usize, m: usize) -> Vec<usize> {
        (0..p.pow(m as u32))
            .map(|code| monic_from_code(code, m, p))
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree")
    }
}

/// Arithmetic of dimension N: either GF(p^m) or the ring Z/NZ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArithmeticContext {
    mode: Mode,
    p: usize,
    m: usize,
    n: usize,
    /// Monic irreducible used for GF(p^m), coefficients low-to-high.
    irreducible: Option<Vec<usize>>,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    inv: Vec<Option<usize>>,
    #[serde(skip)]
    chars: Vec<Complex64>,
}

fn root_of_unity(order: usize, power: usize) -> Complex64 {
    let power = power % order;
    // exact values where they exist keep the qubit identities bit-clean
    match (order, power) {
        (_, 0) => Complex64::new(1.0, 0.0),
        (2, 1) => Complex64::new(-1.0, 0.0),
        (4, 1) => Complex64::new(0.0, 1.0),
        (4, 2) => Complex64::new(-1.0, 0.0),
        (4, 3) => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, TAU * power as f64 / order as f64),
    }
}

impl ArithmeticContext {
    /// GF(p^m) with the smallest monic irreducible of degree m.
    pub fn galois(p: usize, m: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m < 1 {
            return Err(Error::InvalidDegree(m));
        }
        let n = p.pow(m as u32);
        let modulus = poly::smallest_irreducible(p, m);
        let digits =
            |x: usize| -> Vec<usize> { (0..m).map(|k| (x / p.pow(k as u32)) % p).collect() };
        let label = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            let da = digits(a);
            for b in 0..n {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * n + b] = label(&sum);
                let prod = poly::rem_monic(&poly::mul(&da, &db, p), &modulus, p);
                mul[a * n + b] = label(&prod[..m.min(prod.len())]);
            }
        }
        let chars = (0..n).map(|g| root_of_unity(p, g % p)).collect();
        Ok(Self::finish(
            Mode::Galois,
            p,
            m,
            n,
            Some(modulus),
            add,
            mul,
            chars,
        ))
    }

    /// Z/NZ with the N-th root of unity as character root. `p` is reported as
    /// the smallest prime divisor of N and `m` as its multiplicity.
    pub fn modular(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(
                n,
                "modular dimension must be at least 2",
            ));
        }
        let p = smallest_prime_factor(n);
        let mut m = 0;
        let mut rest = n;
        while rest.is_multiple_of(p) {
            rest /= p;
            m += 1;
        }
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = (a + b) % n;
                mul[a * n + b] = (a * b) % n;
            }
        }
        let chars = (0..n).map(|g| root_of_unity(n, g)).collect();
        Ok(Self::finish(Mode::Modular, p, m, n, None, add, mul, chars))
    }

    /// Galois mode requires `n` to be a prime power.
    pub fn for_dimension(mode: Mode, n: usize) -> Result<Self> {
        match mode {
            Mode::Galois => {
                let (p, m) = prime_power(n).ok_or(Error::InvalidDimension(
                    n,
                    "galois mode needs a prime power",
                ))?;
                Self::galois(p, m)
            }
            Mode::Modular => Self::modular(n),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        mode: Mode,
        p: usize,
        m: usize,
        n: usize,
        irreducible: Option<Vec<usize>>,
        add: Vec<usize>,
        mul: Vec<usize>,
        chars: Vec<Complex64>,
    ) -> Self {
        let neg = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| add[a * n + b] == 0)
                    .expect("additive inverse")
            })
            .collect();
        let mut inv: Vec<Option<usize>> = (0..n)
            .map(|a| (0..n).find(|&b| mul[a * n + b] == 1))
            .collect();
        inv[0] = None;
        Self {
            mode,
            p,
            m,
            n,
            irreducible,
            add,
            mul,
            neg,
            inv,
            chars,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Characteristic in galois mode, smallest prime divisor of N otherwise.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn irreducible(&self) -> Option<&[usize]> {
        self.irreducible.as_deref()
    }

    /// True when 2 is invertible (odd characteristic, or odd N in modular mode).
    pub fn is_odd(&self) -> bool {
        match self.mode {
            Mode::Galois => self.p != 2,
            Mode::Modular => self.n % 2 == 1,
        }
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        self.inv[a]
    }

    pub fn add_table(&self) -> &[usize] {
        &self.add
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn neg_table(&self) -> &[usize] {
        &self.neg
    }

    pub fn inv_table(&self) -> &[Option<usize>] {
        &self.inv
    }

    /// Element with integer label `k` reduced into the context, i.e. `1 ⊕ … ⊕ 1` (k times).
    pub fn from_integer(&self, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.add(acc, 1 % self.n))
    }

    /// p-ary digits of a label, lowest first.
    pub fn digits(&self, g: usize) -> Vec<usize> {
        (0..self.m)
            .map(|k| (g / self.p.pow(k as u32)) % self.p)
            .collect()
    }

    /// The primitive root the characters are powers of.
    pub fn char_root(&self) -> Complex64 {
        match self.mode {
            Mode::Galois => root_of_unity(self.p, 1),
            Mode::Modular => root_of_unity(self.n, 1),
        }
    }

    pub fn character(&self, g: usize) -> Result<Complex64> {
        self.chars.get(g).copied().ok_or(Error::OutOfRange {
            value: g,
            dim: self.n,
        })
    }

    /// Unchecked [`character`](Self::character) for inner loops.
    #[inline]
    pub fn chi(&self, g: usize) -> Complex64 {
        self.chars[g]
    }

    /// `g ⊙ 2⁻¹`.
    pub fn half(&self, g: usize) -> Result<usize> {
        if g >= self.n {
            return Err(Error::OutOfRange {
                value: g,
                dim: self.n,
            });
        }
        let two = self.from_integer(2);
        let inv2 = self.inv(two).ok_or(Error::EvenCharacteristic(self.n))?;
        Ok(self.mul(g, inv2))
    }
}

/// Polymorphic entry point matching the CLI's `--mode/--p/--m` triple.
/// In modular mode `p_or_n` is N and `m` is ignored.
pub fn build_context(mode: Mode, p_or_n: usize, m: usize) -> Result<ArithmeticContext> {
    match mode {
        Mode::Galois => ArithmeticContext::galois(p_or_n, m),
        Mode::Modular => ArithmeticContext::modular(p_or_n),
    }
}

/// GF(N²) as pairs `(a, b) ↔ a + b·t` over GF(N), with `t² = a₀ ⊕ b₀·t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionContext {
    base: ArithmeticContext,
    /// Constant term of the reduction rule `t² ↦ a₀ + b₀·t`.
    a0: usize,
    b0: usize,
}

impl ExtensionContext {
    /// Picks the monic irreducible `t² + c₁t + c₀` with the smallest label
    /// `c₀ + c₁·N`, then reduces with `t² = ⊖c₀ ⊕ ⊖c₁·t`.
    pub fn build(base: &ArithmeticContext) -> Result<Self> {
        if base.mode() != Mode::Galois {
            return Err(Error::WrongMode { expected: "galois" });
        }
        let n = base.dim();
        let (c0, c1) = (0..n * n)
            .map(|code| (code % n, code / n))
            .find(|&(c0, c1)| {
                base.elements()
                    .all(|t| base.add(base.add(base.mul(t, t), base.mul(c1, t)), c0) != 0)
            })
            .expect("an irreducible quadratic exists over every finite field");
        Ok(Self {
            base: base.clone(),
            a0: base.neg(c0),
            b0: base.neg(c1),
        })
    }

    pub fn base(&self) -> &ArithmeticContext {
        &self.base
    }

    /// Coefficients `(c₀, c₁, 1)` of the defining quadratic, low-to-high.
    pub fn quadratic(&self) -> [usize; 3] {
        [self.base.neg(self.a0), self.base.neg(self.b0), 1]
    }

    /// The residue R: first component of `(0,1)⊙⊙(0,1)`.
    pub fn residue(&self) -> usize {
        self.a0
    }

    pub fn dim(&self) -> usize {
        self.base.dim() * self.base.dim()
    }

    pub fn add(&self, x: (usize, usize), y: (usize, usize)) -> (usize, usize) {
        (self.base.add(x.0, y.0), self.base.add(x.1, y.1))
    }

    pub fn mul(&self, x: (usize, usize), y: (usize, usize)) -> (usize, usize) {
        let f = &self.base;
        let tt = f.mul(x.1, y.1);
        let re = f.add(f.mul(x.0, y.0), f.mul(tt, self.a0));
        let im = f.add(f.add(f.mul(x.0, y.1), f.mul(x.1, y.0)), f.mul(tt, self.b0));
        (re, im)
    }

    /// Label of a pair: `a + b·N`.
    pub fn label(&self, x: (usize, usize)) -> usize {
        x.0 + x.1 * self.base.dim()
    }

    pub fn pair(&self, label: usize) -> (usize, usize) {
        (label % self.base.dim(), label / self.base.dim())
    }

    /// Additive character of GF(N²); depends on the lowest digit of `a` only.
    pub fn character(&self, x: (usize, usize)) -> Complex64 {
        self.base.chi(x.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn gf3_matches_mod3() {
        let f = ArithmeticContext::galois(3, 1).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f.add(a, b), (a + b) % 3);
                assert_eq!(f.mul(a, b), (a * b) % 3);
            }
        }
        assert_eq!(f.irreducible(), Some(&[0, 1][..]));
    }

    #[test]
    fn gf4_add_is_xor() {
        let f = ArithmeticContext::galois(2, 2).unwrap();
        assert_eq!(f.add(2, 3), 1);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.add(a, b), a ^ b);
            }
        }
    }

    #[test]
    fn gf4_mul_against_hand_reduction() {
        // x·(x+1) = x² + x ≡ (x + 1) + x = 1 mod x² + x + 1
        let f = ArithmeticContext::galois(2, 2).unwrap();
        assert_eq!(f.irreducible(), Some(&[1, 1, 1][..]));
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(3, 3), 2);
    }

    #[test]
    fn smallest_irreducibles() {
        assert_eq!(poly::smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(poly::smallest_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
        assert_eq!(poly::smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(poly::smallest_irreducible(5, 1), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ArithmeticContext::galois(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(
            ArithmeticContext::galois(3, 0),
            Err(Error::InvalidDegree(0))
        );
        assert!(ArithmeticContext::for_dimension(Mode::Galois, 6).is_err());
        assert!(ArithmeticContext::modular(1).is_err());
    }

    #[test]
    fn characters() {
        let gf2 = ArithmeticContext::galois(2, 1).unwrap();
        assert!(close(gf2.character(1).unwrap(), Complex64::new(-1.0, 0.0)));
        let gf4 = ArithmeticContext::galois(2, 2).unwrap();
        assert!(close(gf4.character(2).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(close(gf4.character(0).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(gf4.character(4).is_err());
        let z15 = ArithmeticContext::modular(15).unwrap();
        assert!(close(
            z15.character(1).unwrap(),
            Complex64::from_polar(1.0, TAU / 15.0)
        ));
        assert_eq!((z15.p(), z15.m()), (3, 1));
    }

    #[test]
    fn half_values() {
        let gf3 = ArithmeticContext::galois(3, 1).unwrap();
        assert_eq!(gf3.half(1), Ok(2));
        assert_eq!(gf3.half(0), Ok(0));
        let gf9 = ArithmeticContext::galois(3, 2).unwrap();
        for g in gf9.elements() {
            let h = gf9.half(g).unwrap();
            assert_eq!(gf9.add(h, h), g);
        }
        assert_eq!(
            ArithmeticContext::galois(2, 3).unwrap().half(1),
            Err(Error::EvenCharacteristic(8))
        );
        assert_eq!(
            ArithmeticContext::modular(4).unwrap().half(1),
            Err(Error::EvenCharacteristic(4))
        );
        assert!(gf3.half(3).is_err());
    }

    #[test]
    fn extension_gf2_and_gf3() {
        let e = ExtensionContext::build(&ArithmeticContext::galois(2, 1).unwrap()).unwrap();
        assert_eq!(e.quadratic(), [1, 1, 1]);
        assert_eq!(e.mul((0, 1), (0, 1)), (1, 1));
        assert_eq!(e.residue(), 1);

        let e = ExtensionContext::build(&ArithmeticContext::galois(3, 1).unwrap()).unwrap();
        assert_eq!(e.quadratic(), [1, 0, 1]);
        assert_eq!(e.mul((0, 1), (0, 1)), (2, 0));
        assert_eq!(e.residue(), 2);
    }

    #[test]
    fn extension_requires_galois() {
        let z9 = ArithmeticContext::modular(9).unwrap();
        assert!(ExtensionContext::build(&z9).is_err());
    }

    #[test]
    fn ext_character_values() {
        let e = ExtensionContext::build(&ArithmeticContext::galois(2, 2).unwrap()).unwrap();
        assert!(close(e.character((0, 0)), Complex64::new(1.0, 0.0)));
        assert!(close(e.character((1, 3)), Complex64::new(-1.0, 0.0)));
        assert_eq!(e.pair(e.label((3, 2))), (3, 2));
    }
}
