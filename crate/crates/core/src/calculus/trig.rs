use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `x^powers · cos(freq·q)` or `x^powers · sin(freq·q)`, where `q` are the
/// angle coordinates and `x` the line coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub freq: Vec<i64>,
    pub sin: bool,
}

impl Monomial {
    fn is_constant_harmonic(&self) -> bool {
        self.freq.iter().all(|&k| k == 0)
    }
}

/// A finite sum of rational multiples of [`Monomial`]s on `Tᵃ × Rˡ`.
///
/// Canonical form: the first nonzero frequency of every harmonic is
/// positive, `sin(0)` never appears and no stored coefficient is zero.
#[derive(Clone)]
pub struct TrigPoly {
    angles: usize,
    lines: usize,
    terms: BTreeMap<Monomial, BigRational>,
    compiled: OnceLock<Arc<Compiled>>,
}

impl PartialEq for TrigPoly {
    fn eq(&self, other: &Self) -> bool {
        self.angles == other.angles && self.lines == other.lines && self.terms == other.terms
    }
}

impl Eq for TrigPoly {}

impl std::hash::Hash for TrigPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.angles.hash(state);
        self.lines.hash(state);
        self.terms.hash(state);
    }
}

fn rat(c: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(c))
}

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

impl TrigPoly {
    pub fn zero(angles: usize, lines: usize) -> Self {
        TrigPoly {
            angles,
            lines,
            terms: BTreeMap::new(),
            compiled: OnceLock::new(),
        }
    }

    pub fn constant(angles: usize, lines: usize, c: BigRational) -> Self {
        let mut p = Self::zero(angles, lines);
        p.add_term(
            Monomial {
                powers: vec![0; lines],
                freq: vec![0; angles],
                sin: false,
            },
            c,
        );
        p
    }

    pub fn from_int(angles: usize, lines: usize, c: i64) -> Self {
        Self::constant(angles, lines, rat(c))
    }

    /// `c · cos(freq·q)` or `c · sin(freq·q)`.
    pub fn harmonic(angles: usize, lines: usize, freq: Vec<i64>, sin: bool, c: BigRational) -> Self {
        assert_eq!(freq.len(), angles);
        let mut p = Self::zero(angles, lines);
        p.add_term(
            Monomial {
                powers: vec![0; lines],
                freq,
                sin,
            },
            c,
        );
        p
    }

    /// The line coordinate `x_j` raised to `e`.
    pub fn line_power(angles: usize, lines: usize, j: usize, e: u32) -> Self {
        let mut powers = vec![0; lines];
        powers[j] = e;
        let mut p = Self::zero(angles, lines);
        p.add_term(
            Monomial {
                powers,
                freq: vec![0; angles],
                sin: false,
            },
            BigRational::one(),
        );
        p
    }

    pub fn from_terms<I>(angles: usize, lines: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(angles, lines);
        for (m, c) in terms {
            assert_eq!(m.powers.len(), lines);
            assert_eq!(m.freq.len(), angles);
            p.add_term(m, c);
        }
        p
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                (m.is_constant_harmonic() && m.powers.iter().all(|&e| e == 0)).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Coefficient of the constant monomial, i.e. the mean over the angles
    /// at the origin of the line coordinates.
    pub fn constant_coefficient(&self) -> BigRational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_constant_harmonic() && m.powers.iter().all(|&e| e == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn depends_on_lines(&self) -> bool {
        self.terms.keys().any(|m| m.powers.iter().any(|&e| e > 0))
    }

    pub fn max_frequency(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|m| m.freq.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, mut m: Monomial, mut c: BigRational) {
        if c.is_zero() {
            return;
        }
        if let Some(&k) = m.freq.iter().find(|&&k| k != 0) {
            if k < 0 {
                m.freq.iter_mut().for_each(|k| *k = -*k);
                if m.sin {
                    c = -c;
                }
            }
        } else if m.sin {
            return;
        }
        self.compiled = OnceLock::new();
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            self.angles == other.angles && self.lines == other.lines,
            "trig polynomials on different spaces"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.angles, self.lines);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same(other);
        let mut out = Self::zero(self.angles, self.lines);
        let h = half();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let powers: Vec<u32> = ma.powers.iter().zip(&mb.powers).map(|(a, b)| a + b).collect();
                let plus: Vec<i64> = ma.freq.iter().zip(&mb.freq).map(|(a, b)| a + b).collect();
                let minus: Vec<i64> = ma.freq.iter().zip(&mb.freq).map(|(a, b)| a - b).collect();
                let c = ca * cb * &h;
                let term = |freq: Vec<i64>, sin: bool| Monomial {
                    powers: powers.clone(),
                    freq,
                    sin,
                };
                match (ma.sin, mb.sin) {
                    (false, false) => {
                        out.add_term(term(minus, false), c.clone());
                        out.add_term(term(plus, false), c);
                    }
                    (true, true) => {
                        out.add_term(term(minus, false), c.clone());
                        out.add_term(term(plus, false), -c);
                    }
                    (true, false) => {
                        out.add_term(term(plus, true), c.clone());
                        out.add_term(term(minus, true), c);
                    }
                    (false, true) => {
                        out.add_term(term(plus, true), c.clone());
                        out.add_term(term(minus, true), -c);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::from_int(self.angles, self.lines, 1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative in coordinate `i`; angles come first.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.angles, self.lines);
        if i < self.angles {
            for (m, c) in &self.terms {
                let k = m.freq[i];
                if k == 0 {
                    continue;
                }
                let mut d = m.clone();
                d.sin = !m.sin;
                let factor = if m.sin { rat(k) } else { rat(-k) };
                out.add_term(d, c * factor);
            }
        } else {
            let j = i - self.angles;
            assert!(j < self.lines, "coordinate {i} out of range");
            for (m, c) in &self.terms {
                let e = m.powers[j];
                if e == 0 {
                    continue;
                }
                let mut d = m.clone();
                d.powers[j] -= 1;
                out.add_term(d, c * rat(e as i64));
            }
        }
        out
    }

    /// Reinterprets the polynomial on a space with `extra` more line
    /// coordinates, on which it does not depend.
    pub fn extend_lines(&self, extra: usize) -> Self {
        Self::from_terms(
            self.angles,
            self.lines + extra,
            self.terms.iter().map(|(m, c)| {
                let mut m = m.clone();
                m.powers.resize(self.lines + extra, 0);
                (m, c.clone())
            }),
        )
    }

    /// Upper bound for `|self|` on `Tᵃ × [−b, b]ˡ`.
    pub fn sup_bound(&self, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let deg: u32 = m.powers.iter().sum();
                c.abs().to_f64().unwrap_or(f64::INFINITY) * b.powi(deg as i32)
            })
            .sum()
    }

    fn compiled(&self) -> &Compiled {
        self.compiled.get_or_init(|| Arc::new(Compiled::new(self)))
    }

    /// Evaluates at `x = (q, lines)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compiled().eval(x)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !m.is_constant_harmonic() {
                let arg = m
                    .freq
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(a, &k)| match k {
                        1 => names[a].clone(),
                        -1 => format!("-{}", names[a]),
                        _ => format!("{k}{}", names[a]),
                    })
                    .collect::<Vec<_>>()
                    .join("+")
                    .replace("+-", "-");
                factors.push(format!("{}({arg})", if m.sin { "sin" } else { "cos" }));
            }
            for (j, &e) in m.powers.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[self.angles + j].clone()),
                    _ => factors.push(format!("{}^{e}", names[self.angles + j])),
                }
            }
            if factors.is_empty() || !mag.is_one() {
                factors.insert(0, mag.to_string());
            }
            out.push_str(&factors.join(" "));
        }
        out
    }

    fn default_names(&self) -> Vec<String> {
        (0..self.angles)
            .map(|i| format!("q{}", i + 1))
            .chain((0..self.lines).map(|j| format!("x{}", j + 1)))
            .collect()
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&self.default_names()))
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TrigPoly[{}|{}]({})", self.angles, self.lines, self)
    }
}

/// Floating-point image of a [`TrigPoly`] for fast evaluation.
struct Compiled {
    angles: usize,
    terms: Vec<CompiledTerm>,
}

struct CompiledTerm {
    c: f64,
    powers: Vec<(usize, i32)>,
    freq: Vec<(usize, f64)>,
    kind: Kind,
}

enum Kind {
    Const,
    Cos,
    Sin,
}

impl Compiled {
    fn new(p: &TrigPoly) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| CompiledTerm {
                c: c.to_f64().expect("coefficient fits in f64"),
                powers: m
                    .powers
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| (j, e as i32))
                    .collect(),
                freq: m
                    .freq
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| (i, k as f64))
                    .collect(),
                kind: if m.is_constant_harmonic() {
                    Kind::Const
                } else if m.sin {
                    Kind::Sin
                } else {
                    Kind::Cos
                },
            })
            .collect();
        Compiled {
            angles: p.angles,
            terms,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.c;
            for &(j, e) in &t.powers {
                v *= x[self.angles + j].powi(e);
            }
            match t.kind {
                Kind::Const => {}
                Kind::Cos | Kind::Sin => {
                    let phase: f64 = t.freq.iter().map(|&(i, k)| k * x[i]).sum();
                    v *= if matches!(t.kind, Kind::Cos) {
                        phase.cos()
                    } else {
                        phase.sin()
                    };
                }
            }
            acc += v;
        }
        acc
    }
}

/// Parses an exact rational from `"3"`, `"-1/4"`, `"0.1"` or `"2.5e-3"`.
/// Decimals are read exactly in base ten.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Exact decimal value of the shortest representation of `x`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    parse_rational(&format!("{x:e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_negative_frequency() {
        let a = TrigPoly::harmonic(1, 0, vec![-2], false, rat(3));
        let b = TrigPoly::harmonic(1, 0, vec![2], false, rat(3));
        assert_eq!(a, b);
        let s = TrigPoly::harmonic(1, 0, vec![-1], true, rat(1));
        assert_eq!(s, TrigPoly::harmonic(1, 0, vec![1], true, rat(-1)));
        assert!(TrigPoly::harmonic(2, 0, vec![0, 0], true, rat(5)).is_zero());
    }

    #[test]
    fn pythagoras() {
        let c = TrigPoly::harmonic(1, 0, vec![1], false, rat(1));
        let s = TrigPoly::harmonic(1, 0, vec![1], true, rat(1));
        assert_eq!(c.mul(&c).add(&s.mul(&s)), TrigPoly::from_int(1, 0, 1));
    }

    #[test]
    fn double_angle() {
        let c = TrigPoly::harmonic(1, 0, vec![1], false, rat(1));
        let s = TrigPoly::harmonic(1, 0, vec![1], true, rat(1));
        assert_eq!(s.mul(&c).scale(&rat(2)), TrigPoly::harmonic(1, 0, vec![2], true, rat(1)));
    }

    #[test]
    fn derivatives() {
        let p = TrigPoly::harmonic(2, 1, vec![1, -3], true, rat(2)).mul(&TrigPoly::line_power(2, 1, 0, 2));
        // p = 2 sin(q1 − 3q2) x², ∂_{q2} p = −6 cos(q1 − 3q2) x².
        let expect = TrigPoly::harmonic(2, 1, vec![1, -3], false, rat(-6)).mul(&TrigPoly::line_power(2, 1, 0, 2));
        assert_eq!(p.partial(1), expect);
        let dx = TrigPoly::harmonic(2, 1, vec![1, -3], true, rat(4)).mul(&TrigPoly::line_power(2, 1, 0, 1));
        assert_eq!(p.partial(2), dx);
    }

    #[test]
    fn evaluation_matches_formula() {
        let p = TrigPoly::harmonic(2, 1, vec![1, 2], false, r(1, 2))
            .add(&TrigPoly::line_power(2, 1, 0, 3))
            .add(&TrigPoly::from_int(2, 1, -1));
        let x = [0.3, -1.1, 0.7];
        let expect = 0.5 * (0.3f64 - 2.2).cos() + 0.7f64.powi(3) - 1.0;
        assert!((p.eval(&x) - expect).abs() < 1e-15);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.1"), Some(r(1, 10)));
        assert_eq!(parse_rational("-1/4"), Some(r(-1, 4)));
        assert_eq!(parse_rational("2.5e-3"), Some(r(1, 400)));
        assert_eq!(parse_rational("12"), Some(r(12, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(rational_from_f64(0.1), Some(r(1, 10)));
    }

    #[test]
    fn display() {
        let p = TrigPoly::harmonic(2, 0, vec![1, -1], false, r(1, 2)).add(&TrigPoly::from_int(2, 0, -3));
        assert_eq!(p.to_string(), "-3 + 1/2 cos(q1-q2)");
    }
}
