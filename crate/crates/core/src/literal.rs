//! Text literals for curves, operators, systems and flow bindings.
//!
//! ```text
//! curve    := affine r b | staircase tau b | linear r
//!           | points [ row, ... ] [periodic from period increment]
//! row      := (x, y_left, y, slope) | (x, y_left, y, y_right, slope)
//! operator := lrq r | lb r b | sc tau b | tsn tau K | ps tau | pb rho K
//!           | lambda-nu lambda nu | g curve | ac curve | max(operator, operator)
//! system   := identity | damper d | pserver rate [s,e] ... | jitter seed dmax
//! bindings := { flow: operator, ... }
//! ```
//!
//! Numbers are integers or `p/q`; curve values may also be `inf`. In a
//! four-value row, the segment after `x` has the given slope and ends at the
//! next row's `y_left`; the last row starts its segment at `y`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::curves::{Breakpoint, Curve, Tail};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::operators::RegulationOperator;
use crate::systems::FifoSystem;
use crate::traces::FlowId;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigRational),
    Word(String),
    Punct(char),
}

fn parse_error(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        message: message.into(),
    }
}

/// Parses an integer or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || parse_error(format!("bad number `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = match den {
        Some(d) if !d.starts_with(['-', '+']) => BigInt::from_str(d).map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::from(1),
    };
    if den == BigInt::from(0) {
        return Err(parse_error(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(num, den))
}

/// Parses a number or `inf` / `-inf`.
pub fn parse_ext_rational(s: &str) -> Result<Ext<BigRational>> {
    match s {
        "inf" | "+inf" => Ok(Ext::PosInf),
        "-inf" => Ok(Ext::NegInf),
        _ => parse_rational(s).map(Ext::Finite),
    }
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "()[]{},:".contains(c) {
            out.push(Token::Punct(c));
            i += 1;
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(parse_rational(&text)?));
        } else if c.is_ascii_alphabetic() || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '-' || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Word(chars[start..i].iter().collect()));
        } else {
            return Err(parse_error(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(s)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.peek().cloned().ok_or_else(|| parse_error("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.next()? {
            Token::Punct(p) if p == c => Ok(()),
            other => Err(parse_error(format!("expected `{c}`, found {}", describe(&other)))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.next()? {
            Token::Word(w) => Ok(w),
            other => Err(parse_error(format!("expected a keyword, found {}", describe(&other)))),
        }
    }

    fn number(&mut self) -> Result<BigRational> {
        match self.next()? {
            Token::Num(n) => Ok(n),
            other => Err(parse_error(format!("expected a number, found {}", describe(&other)))),
        }
    }

    fn ext_number(&mut self) -> Result<Ext<BigRational>> {
        match self.next()? {
            Token::Num(n) => Ok(Ext::Finite(n)),
            Token::Word(w) if w == "inf" => Ok(Ext::PosInf),
            other => Err(parse_error(format!("expected a value, found {}", describe(&other)))),
        }
    }

    fn count<N: TryFrom<BigInt>>(&mut self, what: &str) -> Result<N> {
        let n = self.number()?;
        if !n.is_integer() {
            return Err(parse_error(format!("{what} must be an integer, got {n}")));
        }
        N::try_from(n.to_integer()).map_err(|_| parse_error(format!("{what} out of range: {n}")))
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(parse_error(format!("trailing input at {}", describe(t)))),
        }
    }

    fn curve(&mut self) -> Result<Curve<BigRational>> {
        let kind = self.word()?;
        match kind.as_str() {
            "affine" => Curve::affine(self.number()?, self.number()?),
            "staircase" => Curve::staircase(self.number()?, self.number()?),
            "linear" => Curve::linear(self.number()?),
            "points" => self.points(),
            _ => Err(parse_error(format!("unknown curve `{kind}`"))),
        }
    }

    fn points(&mut self) -> Result<Curve<BigRational>> {
        self.expect('[')?;
        let mut rows: Vec<Vec<Ext<BigRational>>> = Vec::new();
        while !self.eat(']') {
            if !rows.is_empty() {
                self.expect(',')?;
            }
            self.expect('(')?;
            let mut row = vec![self.ext_number()?];
            while self.eat(',') {
                row.push(self.ext_number()?);
            }
            self.expect(')')?;
            if row.len() != 4 && row.len() != 5 {
                return Err(parse_error(format!("curve rows have 4 or 5 values, got {}", row.len())));
            }
            rows.push(row);
        }
        let finite = |v: &Ext<BigRational>, what: &str| {
            v.finite().cloned().ok_or_else(|| parse_error(format!("{what} must be finite")))
        };
        let explicit = rows.iter().all(|r| r.len() == 5);
        let mut curve = if explicit {
            let mut points = Vec::with_capacity(rows.len());
            for r in &rows {
                points.push(Breakpoint::new(
                    finite(&r[0], "abscissa")?,
                    r[2].clone(),
                    r[3].clone(),
                    finite(&r[4], "slope")?,
                ));
            }
            let curve = Curve::new(points, Tail::Affine)?;
            for (r, p) in rows.iter().zip(curve.points()).skip(1) {
                if curve.left_limit(&p.x)? != r[1] {
                    return Err(Error::InvalidCurve(format!("left limit at {} is not {}", p.x, r[1])));
                }
            }
            curve
        } else if rows.iter().all(|r| r.len() == 4) {
            let mut lim = Vec::with_capacity(rows.len());
            for r in rows {
                lim.push((finite(&r[0], "abscissa")?, r[1].clone(), r[2].clone(), finite(&r[3], "slope")?));
            }
            Curve::from_limits(lim)?
        } else {
            return Err(parse_error("curve rows must all have the same arity"));
        };
        if self.peek() == Some(&Token::Word("periodic".into())) {
            self.pos += 1;
            let from = self.count::<usize>("periodic start")?;
            let period = self.number()?;
            let increment = self.number()?;
            curve = Curve::new(
                curve.points().to_vec(),
                Tail::Periodic {
                    from,
                    period,
                    increment,
                },
            )?;
        }
        Ok(curve)
    }

    fn operator(&mut self) -> Result<RegulationOperator<BigRational>> {
        type Op = RegulationOperator<BigRational>;
        let kind = self.word()?;
        match kind.as_str() {
            "lrq" => Op::lrq(self.number()?),
            "lb" => Op::leaky_bucket(self.number()?, self.number()?),
            "sc" => Op::staircase(self.number()?, self.number()?),
            "tsn" => Op::tsn_packet_rate(self.number()?, self.count("K")?),
            "ps" => Op::packet_spacing(self.number()?),
            "pb" => Op::packet_burstiness(self.number()?, self.count("K")?),
            "lambda-nu" => Op::lambda_nu(self.number()?, self.count("nu")?),
            "g" => Op::g_regulation(self.curve()?),
            "ac" => Ok(Op::arrival_curve(self.curve()?)),
            "max" => {
                self.expect('(')?;
                let a = self.operator()?;
                self.expect(',')?;
                let b = self.operator()?;
                self.expect(')')?;
                Ok(Op::max_of(a, b))
            }
            _ => Err(parse_error(format!("unknown operator `{kind}`"))),
        }
    }

    fn system(&mut self) -> Result<FifoSystem<BigRational>> {
        let kind = self.word()?;
        match kind.as_str() {
            "identity" => Ok(FifoSystem::Identity),
            "damper" => FifoSystem::damper(self.number()?),
            "pserver" => {
                let rate = self.number()?;
                let mut windows = Vec::new();
                while self.eat('[') {
                    let s = self.number()?;
                    self.expect(',')?;
                    let e = self.number()?;
                    self.expect(']')?;
                    windows.push((s, e));
                }
                FifoSystem::preemptive_server(rate, windows)
            }
            "jitter" => {
                let seed = self.count("seed")?;
                FifoSystem::bounded_jitter(seed, self.number()?)
            }
            _ => Err(parse_error(format!("unknown system `{kind}`"))),
        }
    }

    fn bindings(&mut self) -> Result<BTreeMap<FlowId, RegulationOperator<BigRational>>> {
        self.expect('{')?;
        let mut out = BTreeMap::new();
        while !self.eat('}') {
            if !out.is_empty() {
                self.expect(',')?;
            }
            let flow: FlowId = self.count("flow id")?;
            self.expect(':')?;
            if out.insert(flow, self.operator()?).is_some() {
                return Err(parse_error(format!("flow {flow} bound twice")));
            }
        }
        Ok(out)
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Num(n) => format!("number `{n}`"),
        Token::Word(w) => format!("`{w}`"),
        Token::Punct(c) => format!("`{c}`"),
    }
}

fn whole<R>(s: &str, f: impl FnOnce(&mut Parser) -> Result<R>) -> Result<R> {
    let mut p = Parser::new(s)?;
    let r = f(&mut p)?;
    p.finish()?;
    Ok(r)
}

pub fn parse_curve(s: &str) -> Result<Curve<BigRational>> {
    whole(s, Parser::curve)
}

pub fn parse_operator(s: &str) -> Result<RegulationOperator<BigRational>> {
    whole(s, Parser::operator)
}

pub fn parse_system(s: &str) -> Result<FifoSystem<BigRational>> {
    whole(s, Parser::system)
}

pub fn parse_bindings(s: &str) -> Result<BTreeMap<FlowId, RegulationOperator<BigRational>>> {
    whole(s, Parser::bindings)
}
