//! Text syntax for sequence and set rules.
//!
//! ```text
//! seq := constant(c) | indicator(set) | periodic(v, ...) | harmonic(s)
//!      | alternating-decay | sum(seq, seq) | scale(c, seq)
//!      | piecewise(set, seq, seq)
//! set := evens | odds | all | squares | empty | finite(n, ...) | arith(first, step)
//!      | blocks(periodic, offset, period, len) | blocks(exp, base, num, den)
//!      | not(set) | union(set, set) | inter(set, set) | level(seq, cmp, t)
//! cmp := >= | <= | > | <
//! ```
//!
//! A rule with exactly one argument may also be written `name:arg`, e.g.
//! `indicator:evens` or `constant:3`. The `Display` impls of
//! [`SequenceSpec`] and [`SetSpec`] print the canonical parenthesized form,
//! which parses back to an equal spec.

use thiserror::Error;

use crate::seqset::{BlockRule, Comparator, SequenceSpec, SetSpec, SpecError};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} (at byte {offset})")]
pub struct GrammarError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    Number(&'a str),
    Cmp(Comparator),
    Open,
    Close,
    Comma,
    Colon,
}

struct Lexer<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Self, GrammarError> {
        let bytes = src.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'(' => tokens.push((start, Token::Open)),
                b')' => tokens.push((start, Token::Close)),
                b',' => tokens.push((start, Token::Comma)),
                b':' => tokens.push((start, Token::Colon)),
                b'>' | b'<' => {
                    let eq = bytes.get(i + 1) == Some(&b'=');
                    let sym = &src[i..i + 1 + usize::from(eq)];
                    i += usize::from(eq);
                    let cmp = Comparator::from_symbol(sym).expect("lexed comparator");
                    tokens.push((start, Token::Cmp(cmp)));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while i + 1 < bytes.len()
                        && (bytes[i + 1].is_ascii_alphanumeric()
                            || bytes[i + 1] == b'-'
                            || bytes[i + 1] == b'_')
                    {
                        i += 1;
                    }
                    tokens.push((start, Token::Ident(&src[start..=i])));
                }
                b'0'..=b'9' | b'-' | b'+' | b'.' => {
                    while i + 1 < bytes.len() {
                        let n = bytes[i + 1];
                        let exp_sign = (n == b'-' || n == b'+')
                            && matches!(bytes[i], b'e' | b'E');
                        if n.is_ascii_digit() || n == b'.' || n == b'e' || n == b'E' || exp_sign {
                            i += 1;
                        } else {
                            break;
                        }
                    }
                    tokens.push((start, Token::Number(&src[start..=i])));
                }
                _ => {
                    return Err(GrammarError {
                        offset: start,
                        message: format!("unexpected character {:?}", src[start..].chars().next().unwrap_or('?')),
                    })
                }
            }
            i += 1;
        }
        Ok(Self {
            src,
            tokens,
            pos: 0,
        })
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.src.len(), |(o, _)| *o)
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, GrammarError> {
        Err(GrammarError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Token<'static>, what: &str) -> Result<(), GrammarError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<&'a str, GrammarError> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = *s;
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected a rule name"),
        }
    }

    fn number(&mut self) -> Result<f64, GrammarError> {
        let offset = self.offset();
        match self.next() {
            Some(Token::Number(s)) => s.parse::<f64>().map_err(|_| GrammarError {
                offset,
                message: format!("malformed number {s:?}"),
            }),
            _ => Err(GrammarError {
                offset,
                message: "expected a number".into(),
            }),
        }
    }

    fn index(&mut self) -> Result<u64, GrammarError> {
        let offset = self.offset();
        match self.next() {
            Some(Token::Number(s)) => s.parse::<u64>().map_err(|_| GrammarError {
                offset,
                message: format!("expected a nonnegative integer, got {s:?}"),
            }),
            _ => Err(GrammarError {
                offset,
                message: "expected a nonnegative integer".into(),
            }),
        }
    }

    fn finish(&self) -> Result<(), GrammarError> {
        if self.pos < self.tokens.len() {
            self.error("trailing input")
        } else {
            Ok(())
        }
    }
}

/// Argument list shape after a rule name.
enum Args {
    None,
    Short,
    Paren,
}

impl Args {
    fn open(lx: &mut Lexer<'_>) -> Self {
        match lx.peek() {
            Some(Token::Open) => {
                lx.pos += 1;
                Args::Paren
            }
            Some(Token::Colon) => {
                lx.pos += 1;
                Args::Short
            }
            _ => Args::None,
        }
    }
}

fn sep(lx: &mut Lexer<'_>) -> Result<(), GrammarError> {
    lx.expect(Token::Comma, "','")
}

fn close(lx: &mut Lexer<'_>, args: &Args) -> Result<(), GrammarError> {
    match args {
        Args::Paren => lx.expect(Token::Close, "')'"),
        _ => Ok(()),
    }
}

fn arity_one(lx: &Lexer<'_>, name: &str, args: &Args) -> Result<(), GrammarError> {
    if matches!(args, Args::None) {
        lx.error(format!("{name} takes an argument"))
    } else {
        Ok(())
    }
}

fn multi(lx: &Lexer<'_>, name: &str, args: &Args) -> Result<(), GrammarError> {
    if matches!(args, Args::Paren) {
        Ok(())
    } else {
        lx.error(format!("{name} needs a parenthesized argument list"))
    }
}

fn spec_err(offset: usize) -> impl Fn(SpecError) -> GrammarError {
    move |e| GrammarError {
        offset,
        message: e.to_string(),
    }
}

fn number_list<T>(
    lx: &mut Lexer<'_>,
    mut item: impl FnMut(&mut Lexer<'_>) -> Result<T, GrammarError>,
) -> Result<Vec<T>, GrammarError> {
    let mut out = Vec::new();
    if lx.peek() == Some(&Token::Close) {
        return Ok(out);
    }
    loop {
        out.push(item(lx)?);
        if lx.peek() == Some(&Token::Comma) {
            lx.pos += 1;
        } else {
            return Ok(out);
        }
    }
}

fn sequence(lx: &mut Lexer<'_>) -> Result<SequenceSpec, GrammarError> {
    let at = lx.offset();
    let name = lx.ident()?;
    let args = Args::open(lx);
    let seq = match name {
        "alternating-decay" => {
            if !matches!(args, Args::None) {
                return lx.error("alternating-decay takes no arguments");
            }
            SequenceSpec::alternating_decay()
        }
        "constant" => {
            arity_one(lx, name, &args)?;
            SequenceSpec::constant(lx.number()?).map_err(spec_err(at))?
        }
        "harmonic" => {
            arity_one(lx, name, &args)?;
            SequenceSpec::harmonic(lx.number()?).map_err(spec_err(at))?
        }
        "indicator" => {
            arity_one(lx, name, &args)?;
            SequenceSpec::indicator(&set(lx)?)
        }
        "periodic" => {
            arity_one(lx, name, &args)?;
            let values = if matches!(args, Args::Paren) {
                number_list(lx, |lx| lx.number())?
            } else {
                vec![lx.number()?]
            };
            SequenceSpec::periodic(values).map_err(spec_err(at))?
        }
        "sum" => {
            multi(lx, name, &args)?;
            let a = sequence(lx)?;
            sep(lx)?;
            let b = sequence(lx)?;
            SequenceSpec::sum(&a, &b)
        }
        "scale" => {
            multi(lx, name, &args)?;
            let c = lx.number()?;
            sep(lx)?;
            let x = sequence(lx)?;
            SequenceSpec::scale(c, &x).map_err(spec_err(at))?
        }
        "piecewise" => {
            multi(lx, name, &args)?;
            let on = set(lx)?;
            sep(lx)?;
            let inside = sequence(lx)?;
            sep(lx)?;
            let outside = sequence(lx)?;
            SequenceSpec::piecewise(&on, &inside, &outside)
        }
        other => {
            return Err(GrammarError {
                offset: at,
                message: format!("unknown sequence rule {other:?}"),
            })
        }
    };
    close(lx, &args)?;
    Ok(seq)
}

fn set(lx: &mut Lexer<'_>) -> Result<SetSpec, GrammarError> {
    let at = lx.offset();
    let name = lx.ident()?;
    let args = Args::open(lx);
    let atom = |s: SetSpec, lx: &Lexer<'_>| {
        if matches!(args, Args::None) {
            Ok(s)
        } else {
            lx.error(format!("{name} takes no arguments"))
        }
    };
    let s = match name {
        "evens" => atom(SetSpec::evens(), lx)?,
        "odds" => atom(SetSpec::odds(), lx)?,
        "all" => atom(SetSpec::all(), lx)?,
        "squares" => atom(SetSpec::squares(), lx)?,
        "empty" => atom(SetSpec::empty(), lx)?,
        "finite" => {
            let elems = match args {
                Args::Paren => number_list(lx, |lx| lx.index())?,
                Args::Short => vec![lx.index()?],
                Args::None => return lx.error("finite takes an element list"),
            };
            SetSpec::finite(elems).map_err(spec_err(at))?
        }
        "arith" => {
            multi(lx, name, &args)?;
            let first = lx.index()?;
            sep(lx)?;
            let step = lx.index()?;
            SetSpec::arithmetic(first, step).map_err(spec_err(at))?
        }
        "blocks" => {
            multi(lx, name, &args)?;
            let kind = lx.ident()?;
            sep(lx)?;
            let a = lx.index()?;
            sep(lx)?;
            let b = lx.index()?;
            sep(lx)?;
            let c = lx.index()?;
            let rule = match kind {
                "periodic" => BlockRule::Periodic {
                    offset: a,
                    period: b,
                    len: c,
                },
                "exp" => BlockRule::Exponential {
                    base: a,
                    num: b,
                    den: c,
                },
                other => {
                    return Err(GrammarError {
                        offset: at,
                        message: format!("unknown block rule {other:?}"),
                    })
                }
            };
            SetSpec::blocks(rule).map_err(spec_err(at))?
        }
        "not" => {
            arity_one(lx, name, &args)?;
            set(lx)?.complement()
        }
        "union" | "inter" => {
            multi(lx, name, &args)?;
            let a = set(lx)?;
            sep(lx)?;
            let b = set(lx)?;
            if name == "union" {
                a.union(&b)
            } else {
                a.intersect(&b)
            }
        }
        "level" => {
            multi(lx, name, &args)?;
            let x = sequence(lx)?;
            sep(lx)?;
            let cmp = match lx.next() {
                Some(Token::Cmp(c)) => c,
                _ => {
                    lx.pos -= 1;
                    return lx.error("expected a comparator (>=, <=, >, <)");
                }
            };
            sep(lx)?;
            let t = lx.number()?;
            SetSpec::level(&x, cmp, t)
        }
        other => {
            return Err(GrammarError {
                offset: at,
                message: format!("unknown set rule {other:?}"),
            })
        }
    };
    close(lx, &args)?;
    Ok(s)
}

pub fn parse_sequence(src: &str) -> Result<SequenceSpec, GrammarError> {
    let mut lx = Lexer::new(src)?;
    let s = sequence(&mut lx)?;
    lx.finish()?;
    Ok(s)
}

pub fn parse_set(src: &str) -> Result<SetSpec, GrammarError> {
    let mut lx = Lexer::new(src)?;
    let s = set(&mut lx)?;
    lx.finish()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_and_parens_agree() {
        assert_eq!(
            parse_sequence("indicator:evens").unwrap(),
            parse_sequence("indicator(evens)").unwrap()
        );
        assert_eq!(
            parse_sequence("constant:3").unwrap(),
            SequenceSpec::constant(3.0).unwrap()
        );
        assert_eq!(parse_set("not:squares").unwrap(), SetSpec::squares().complement());
    }

    #[test]
    fn canonical_display_parses_back() {
        for src in [
            "periodic(0, 1, 2)",
            "alternating-decay",
            "sum(harmonic(2), scale(-0.5, indicator(squares)))",
            "piecewise(level(alternating-decay, >=, 1.5), alternating-decay, constant(0))",
            "indicator(union(finite(1,4,9), blocks(exp, 4, 1, 2)))",
            "indicator(inter(arith(3, 7), not(blocks(periodic, 0, 10, 3))))",
            "indicator(level(harmonic(1e-3), <, 2.5e-4))",
        ] {
            let s = parse_sequence(src).unwrap();
            let again = parse_sequence(&s.to_string()).unwrap();
            assert_eq!(s, again, "{src} -> {s}");
        }
    }

    #[test]
    fn errors_are_located() {
        let e = parse_sequence("indicator(evenz)").unwrap_err();
        assert_eq!(e.offset, 10);
        assert!(e.message.contains("evenz"));
        let e = parse_sequence("sum(constant(1) constant(2))").unwrap_err();
        assert_eq!(e.offset, 16);
        let e = parse_sequence("periodic()").unwrap_err();
        assert!(e.message.contains("at least one value"));
        let e = parse_set("arith(0, 0)").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse_sequence("constant(1) x").unwrap_err();
        assert!(e.message.contains("trailing"));
        let e = parse_set("level(constant(1), =, 2)").unwrap_err();
        assert!(e.message.contains("unexpected character"));
        assert!(parse_set("finite(-1)").is_err());
        assert!(parse_sequence("alternating-decay(1)").is_err());
        assert!(parse_set("blocks(periodic, 0, 2, 3)").is_err());
    }
}
