//! Text and JSON input for forms.
//!
//! One-forms on `Tⁿ` in the command-line grammar:
//!
//! ```text
//! form    = "0" | term { ("+" | "-") term } ;
//! term    = [ number ] [ "*" ] [ trig [ "*" ] ] basis ;
//! trig    = ("cos" | "sin") "(" linear ")" ;
//! linear  = lterm { ("+" | "-") lterm } ;
//! lterm   = [ integer ] [ "*" ] "q" [ index ] ;
//! basis   = "dq" [ index ] ;
//! number  = decimal | integer "/" integer ;
//! ```
//!
//! `q` and `dq` abbreviate `q1` and `dq1`; decimals are read exactly; `·`
//! may stand for `*`.
//! Functions use the same grammar with the basis omitted, so `2 + cos(q)`
//! is a function and `(2 + cos(q)) dq` is written `2 dq + cos(q) dq`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use super::trig::{parse_rational, rational_from_f64};
use super::{CalculusError, Form, Monomial, Space, TrigPoly};

#[derive(Debug)]
struct Term {
    coeff: BigRational,
    trig: Option<(bool, Vec<(usize, i64)>)>,
    basis: Option<usize>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).map(|&b| b as char)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(w.as_bytes()) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos] as char;
            let exp_sign = (c == '-' || c == '+')
                && self.pos > start
                && matches!(self.s[self.pos - 1] as char, 'e' | 'E');
            let exp_mark = (c == 'e' || c == 'E')
                && self.pos > start
                && self.s.get(self.pos + 1).is_some_and(|b| b.is_ascii_digit() || *b == b'-' || *b == b'+');
            if c.is_ascii_digit() || c == '.' || c == '/' || exp_sign || exp_mark {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn index(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Some(0);
        }
        let i: usize = std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()?;
        i.checked_sub(1)
    }
}

fn err(msg: impl Into<String>) -> CalculusError {
    CalculusError::Parse(msg.into())
}

fn parse_linear(lx: &mut Lexer) -> Result<Vec<(usize, i64)>, CalculusError> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    if lx.eat('-') {
        sign = -1;
    } else {
        lx.eat('+');
    }
    loop {
        let k = match lx.number() {
            Some(n) => n.parse::<i64>().map_err(|_| err(format!("bad frequency '{n}'")))?,
            None => 1,
        };
        lx.eat('*');
        if !lx.eat('q') {
            return Err(err("expected 'q' in trig argument"));
        }
        let i = lx.index().ok_or_else(|| err("angle indices start at 1"))?;
        out.push((i, sign * k));
        if lx.eat('+') {
            sign = 1;
        } else if lx.eat('-') {
            sign = -1;
        } else {
            break;
        }
    }
    Ok(out)
}

fn parse_term(lx: &mut Lexer, sign: i64, with_basis: bool) -> Result<Term, CalculusError> {
    let coeff = match lx.number() {
        Some(n) => parse_rational(&n).ok_or_else(|| err(format!("bad number '{n}'")))?,
        None => BigRational::one(),
    };
    lx.eat('*');
    let mut trig = None;
    for (name, sin) in [("cos", false), ("sin", true)] {
        if lx.eat_word(name) {
            if !lx.eat('(') {
                return Err(err(format!("expected '(' after {name}")));
            }
            let lin = parse_linear(lx)?;
            if !lx.eat(')') {
                return Err(err("expected ')'"));
            }
            trig = Some((sin, lin));
            lx.eat('*');
            break;
        }
    }
    let basis = if with_basis {
        if !lx.eat_word("dq") {
            return Err(err(format!("expected basis 'dq<i>' at offset {}", lx.pos)));
        }
        Some(lx.index().ok_or_else(|| err("basis indices start at 1"))?)
    } else {
        None
    };
    Ok(Term {
        coeff: coeff * BigRational::from_integer(BigInt::from(sign)),
        trig,
        basis,
    })
}

fn parse_terms(text: &str, with_basis: bool) -> Result<Vec<Term>, CalculusError> {
    let text = text.replace('·', "*");
    let trimmed = text.trim();
    let mut terms = Vec::new();
    if trimmed == "0" {
        return Ok(terms);
    }
    let mut lx = Lexer {
        s: trimmed.as_bytes(),
        pos: 0,
    };
    let mut sign = if lx.eat('-') {
        -1
    } else {
        lx.eat('+');
        1
    };
    loop {
        terms.push(parse_term(&mut lx, sign, with_basis)?);
        if lx.eat('+') {
            sign = 1;
        } else if lx.eat('-') {
            sign = -1;
        } else {
            break;
        }
    }
    if lx.peek().is_some() {
        return Err(err(format!("unexpected input at offset {}", lx.pos)));
    }
    Ok(terms)
}

fn terms_dim(terms: &[Term], min_angles: usize) -> usize {
    terms
        .iter()
        .flat_map(|t| {
            t.basis
                .map(|b| b + 1)
                .into_iter()
                .chain(t.trig.iter().flat_map(|(_, l)| l.iter().map(|(i, _)| i + 1)))
        })
        .max()
        .unwrap_or(1)
        .max(min_angles)
        .max(1)
}

fn term_coeff(t: Term, n: usize) -> TrigPoly {
    match t.trig {
        None => TrigPoly::constant(n, 0, t.coeff),
        Some((sin, lin)) => {
            let mut freq = vec![0i64; n];
            for (i, k) in lin {
                freq[i] += k;
            }
            TrigPoly::harmonic(n, 0, freq, sin, t.coeff)
        }
    }
}

/// Parses a 1-form on `Tⁿ`. The dimension is the largest index used, or
/// `min_angles` if that is larger.
pub fn parse_one_form(text: &str, min_angles: usize) -> Result<Form, CalculusError> {
    let terms = parse_terms(text, true)?;
    let n = terms_dim(&terms, min_angles);
    let mut form = Form::zero(&Space::torus(n), 1);
    for t in terms {
        let basis = t.basis.expect("parsed with basis");
        form = form.add(&Form::monomial(&[basis], term_coeff(t, n)));
    }
    Ok(form)
}

/// Parses a trig polynomial on `Tⁿ` such as `3 + cos(q1) + cos(q2)`.
pub fn parse_function(text: &str, min_angles: usize) -> Result<TrigPoly, CalculusError> {
    let terms = parse_terms(text, false)?;
    let n = terms_dim(&terms, min_angles);
    Ok(terms
        .into_iter()
        .fold(TrigPoly::zero(n, 0), |acc, t| acc.add(&term_coeff(t, n))))
}

fn json_rational(v: &Value) -> Result<BigRational, CalculusError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                n.as_f64().and_then(rational_from_f64).ok_or_else(|| err(format!("bad number {n}")))
            }
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| err(format!("bad number '{s}'"))),
        _ => Err(err(format!("expected a number, found {v}"))),
    }
}

fn json_int_vec(v: &Value) -> Result<Vec<i64>, CalculusError> {
    match v {
        Value::Array(a) => a
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| err(format!("expected integer, found {x}"))))
            .collect(),
        Value::Number(n) => n.as_i64().map(|i| vec![i]).ok_or_else(|| err("expected integer")),
        _ => Err(err(format!("expected integer list, found {v}"))),
    }
}

/// Parses a coefficient: a number, `{ "trig": [[k, cos, sin], …],
/// "p_poly": [[exponents, c], …] }` (the product of the two sums), or a
/// list of such objects (their sum).
pub fn parse_coeff_json(v: &Value, angles: usize, lines: usize) -> Result<TrigPoly, CalculusError> {
    match v {
        Value::Array(items) => {
            let mut acc = TrigPoly::zero(angles, lines);
            for item in items {
                acc = acc.add(&parse_coeff_json(item, angles, lines)?);
            }
            Ok(acc)
        }
        Value::Object(obj) => {
            let trig = match obj.get("trig") {
                None => TrigPoly::from_int(angles, lines, 1),
                Some(Value::Array(hs)) => {
                    let mut acc = TrigPoly::zero(angles, lines);
                    for h in hs {
                        let parts = h.as_array().filter(|p| p.len() == 3).ok_or_else(|| {
                            err("trig entries are [k-vector, cos-coeff, sin-coeff]")
                        })?;
                        let mut freq = json_int_vec(&parts[0])?;
                        if freq.len() > angles {
                            return Err(err("frequency vector longer than the number of angles"));
                        }
                        freq.resize(angles, 0);
                        let (a, b) = (json_rational(&parts[1])?, json_rational(&parts[2])?);
                        acc = acc
                            .add(&TrigPoly::harmonic(angles, lines, freq.clone(), false, a))
                            .add(&TrigPoly::harmonic(angles, lines, freq, true, b));
                    }
                    acc
                }
                Some(other) => return Err(err(format!("'trig' must be a list, found {other}"))),
            };
            let poly = match obj.get("p_poly") {
                None => TrigPoly::from_int(angles, lines, 1),
                Some(Value::Array(ms)) => {
                    let mut acc = TrigPoly::zero(angles, lines);
                    for m in ms {
                        let parts = m
                            .as_array()
                            .filter(|p| p.len() == 2)
                            .ok_or_else(|| err("p_poly entries are [exponents, coeff]"))?;
                        let mut powers: Vec<u32> = json_int_vec(&parts[0])?
                            .into_iter()
                            .map(|e| u32::try_from(e).map_err(|_| err("negative exponent")))
                            .collect::<Result<_, _>>()?;
                        if powers.len() > lines {
                            return Err(err("exponent vector longer than the number of line coordinates"));
                        }
                        powers.resize(lines, 0);
                        let mono = Monomial {
                            powers,
                            freq: vec![0; angles],
                            sin: false,
                        };
                        acc = acc.add(&TrigPoly::from_terms(angles, lines, [(mono, json_rational(&parts[1])?)]));
                    }
                    acc
                }
                Some(other) => return Err(err(format!("'p_poly' must be a list, found {other}"))),
            };
            Ok(trig.mul(&poly))
        }
        other => Ok(TrigPoly::constant(angles, lines, json_rational(other)?)),
    }
}

/// Parses `{ "terms": [{ "basis": ["dq1", "dp1"], "coeff": … }, …] }` or a
/// bare term list on `space`.
pub fn parse_form_json(v: &Value, space: &Space) -> Result<Form, CalculusError> {
    let terms = match v {
        Value::Object(obj) => obj.get("terms").ok_or_else(|| err("form JSON needs 'terms'"))?,
        Value::Array(_) => v,
        _ => return Err(err("form JSON must be an object or a term list")),
    };
    let terms = terms.as_array().ok_or_else(|| err("'terms' must be a list"))?;
    let declared = v.get("degree").and_then(Value::as_u64).map(|d| d as usize);
    let mut form: Option<Form> = None;
    for t in terms {
        let basis = t
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| err("term needs a 'basis' list"))?;
        let idx = basis
            .iter()
            .map(|b| {
                let name = b.as_str().ok_or_else(|| err("basis entries are strings"))?;
                let bare = name.strip_prefix('d').ok_or_else(|| err(format!("basis '{name}' must start with d")))?;
                let bare = match bare {
                    "q" => "q1",
                    "p" => "p1",
                    other => other,
                };
                space
                    .index_of(bare)
                    .ok_or_else(|| err(format!("unknown coordinate '{bare}' for {:?}", space.names())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let coeff = parse_coeff_json(t.get("coeff").unwrap_or(&Value::from(1)), space.angles(), space.lines())?;
        let term = Form::monomial(&idx, coeff);
        form = Some(match form {
            None => term,
            Some(f) => {
                if f.degree() != term.degree() {
                    return Err(err("terms of different degree"));
                }
                f.add(&term)
            }
        });
    }
    let form = form.unwrap_or_else(|| Form::zero(space, declared.unwrap_or(1)));
    if let Some(d) = declared {
        if d != form.degree() {
            return Err(err(format!("declared degree {d} but terms have degree {}", form.degree())));
        }
    }
    Ok(form)
}

/// Periods `∮_{q_i} β` for a closed 1-form on `Tⁿ`, divided by `2π`.
pub fn normalized_periods(beta: &Form) -> Vec<BigRational> {
    (0..beta.angles())
        .map(|i| {
            if beta.is_zero() {
                BigRational::zero()
            } else {
                beta.component(&[i]).constant_coefficient()
            }
        })
        .collect()
}
