use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::poly::Poly;

/// `num / den` over `F_q`, reduced, with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::Usage("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut num, _) = num.divrem(&g);
        let (mut den, _) = den.divrem(&g);
        let lc = den.lead();
        let inv = den.field().inv(lc).expect("nonzero leading coefficient");
        num = num.scale(inv);
        den = den.scale(inv);
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        let one = Poly::one(p.field());
        RationalFunction { num: p, den: one }
    }

    pub fn constant(field: &Field, c: FieldElem) -> RationalFunction {
        RationalFunction::from_poly(Poly::constant(field, c))
    }

    pub fn t(field: &Field) -> RationalFunction {
        RationalFunction::from_poly(Poly::x(field))
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFunction::new(num, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        if self.is_zero() {
            return Err(Error::Usage("0 has no inverse".into()));
        }
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Parses `+ - * / ^`, parentheses, `T`, and integer literals read as
    /// element codes (so `2` is the class of `x` in `F_4 = F_2[x]/(x^2+x+1)`).
    pub fn parse(field: &Field, s: &str) -> Result<RationalFunction> {
        let tokens = tokenize(s)?;
        let mut p = Parser { field, tokens, pos: 0 };
        let r = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(r)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.deg() == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    T,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| Error::Parse(format!("number too large: {text}")))?));
        } else if c == 'T' {
            out.push(Tok::T);
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let d = self.factor()?;
                acc = acc.div(&d).map_err(|_| Error::Parse("division by zero".into()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e = e as i64 * if neg { -1 } else { 1 };
                    return base.pow(e).map_err(|_| Error::Parse("negative power of zero".into()));
                }
                _ => return Err(Error::Parse("expected an integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek().cloned() {
            Some(Tok::Num(c)) => {
                self.pos += 1;
                let e = self.field.from_code(c).map_err(|_| Error::Parse(format!("{c} is not an element code of F_{}", self.field.size())))?;
                Ok(RationalFunction::constant(self.field, e))
            }
            Some(Tok::T) => {
                self.pos += 1;
                Ok(RationalFunction::t(self.field))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let r = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                Ok(r)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    #[test]
    fn parse_and_reduce() {
        let k = GaloisField::default_for(3, 1).unwrap();
        let f = RationalFunction::parse(&k, "(T^2 - 1)/(2*T - 2)").unwrap();
        // (T-1)(T+1) / (2(T-1)) = (T+1)/2 = 2T + 2
        assert_eq!(f.to_string(), "2*T + 2");
        let g = RationalFunction::parse(&k, "T^-2 * (T+1)").unwrap();
        assert_eq!(g.den().deg(), 2);
        assert_eq!(RationalFunction::parse(&k, &g.to_string()).unwrap(), g);
        assert!(RationalFunction::parse(&k, "1/(T-T)").is_err());
        assert!(RationalFunction::parse(&k, "5*T").is_err());
    }
}
