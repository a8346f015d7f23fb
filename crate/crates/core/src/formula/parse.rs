//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! formula := imp
//! imp     := conj ("->" imp)?
//! conj    := neg ("&" neg)*
//! neg     := "!" neg | atom
//! atom    := ident | "pl(" player "," action ")" | "rec(" player "," signal ")"
//!          | prob | "B_" player "(" formula ")" | "EB" ("^" int)? "(" formula ")"
//!          | "CB(" formula ")" | "rat_" player | "opt_" player "(" action ")"
//!          | "(" formula ")"
//! prob    := pterm (("+"|"-") pterm)* ">=" rational
//! pterm   := (rational "*")? "pr_" player "(" formula ")"
//! ```

use std::fmt;

use num_traits::One;

use super::{Atom, Formula};
use crate::game::{is_plain_name, Game, PlayerId};
use crate::rational::{parse_rational, Rational};

/// Identifiers a formula may refer to. `None` lists accept any name.
#[derive(Debug, Clone, Copy)]
pub struct Vocabulary<'a> {
    pub game: &'a Game,
    pub signals: Option<&'a [String]>,
    pub atoms: Option<&'a [String]>,
}

impl<'a> Vocabulary<'a> {
    pub fn new(game: &'a Game) -> Self {
        Vocabulary { game, signals: None, atoms: None }
    }

    pub fn with_signals(mut self, signals: &'a [String]) -> Self {
        self.signals = Some(signals);
        self
    }

    pub fn with_atoms(mut self, atoms: &'a [String]) -> Self {
        self.atoms = Some(atoms);
        self
    }
}

const KEYWORDS: [&str; 4] = ["pl", "rec", "EB", "CB"];
const PREFIXES: [&str; 4] = ["B_", "pr_", "rat_", "opt_"];

/// Whether `name` may be declared as a generic atom.
pub(crate) fn is_atom_name(name: &str) -> bool {
    is_plain_name(name)
        && !name.starts_with(|c: char| c.is_ascii_digit() || c == '\'')
        && !KEYWORDS.contains(&name)
        && !PREFIXES.iter().any(|p| name.starts_with(p))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unexpected { found: String, expected: Vec<String> },
    UnknownPlayer(String),
    UnknownAction { player: String, action: String },
    UnknownSignal(String),
    UnknownAtom(String),
    MixedOwners,
    BadRational(String),
    BadOrder(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "found {found}, expected {}", expected.join(" or "))
            }
            ParseErrorKind::UnknownPlayer(p) => write!(f, "unknown player `{p}`"),
            ParseErrorKind::UnknownAction { player, action } => {
                write!(f, "unknown action `{action}` for player `{player}`")
            }
            ParseErrorKind::UnknownSignal(s) => write!(f, "unknown signal `{s}`"),
            ParseErrorKind::UnknownAtom(a) => write!(f, "unknown atom `{a}`"),
            ParseErrorKind::MixedOwners => write!(f, "probability terms must all use the same player"),
            ParseErrorKind::BadRational(r) => write!(f, "invalid rational `{r}`"),
            ParseErrorKind::BadOrder(o) => write!(f, "invalid EB order `{o}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Amp,
    Bang,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Ge,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Amp => "&",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Ge => ">=",
            Tok::Caret => "^",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'&' => Tok::Amp,
            b'!' => Tok::Bang,
            b'+' => Tok::Plus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'-' => Tok::Minus,
            b'>' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Ge
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Num(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::Unexpected {
                        found: format!("character `{found}`"),
                        expected: vec!["a token".into()],
                    },
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    vocab: Vocabulary<'a>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            position: self.offset(),
            kind: ParseErrorKind::Unexpected {
                found: self.peek().describe(),
                expected: expected.iter().map(|s| s.to_string()).collect(),
            },
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let expected = format!("`{}`", tok.symbol());
            self.unexpected(&[expected.as_str()])
        }
    }

    fn error<T>(&self, position: usize, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError { position, kind })
    }

    fn formula(&mut self) -> PResult<Formula> {
        let left = self.conj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut left = self.neg()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.neg()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn neg(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.neg()?));
        }
        self.atom()
    }

    fn parenthesized(&mut self) -> PResult<Formula> {
        self.expect(Tok::LParen)?;
        let f = self.formula()?;
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    /// A name in player/action/signal position: identifier or number.
    fn name(&mut self, what: &str) -> PResult<(String, usize)> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Num(s) => {
                let at = self.offset();
                self.bump();
                Ok((s, at))
            }
            _ => self.unexpected(&[what]),
        }
    }

    fn resolve_player(&self, token: &str, at: usize) -> PResult<PlayerId> {
        match self.vocab.game.find_player(token) {
            Some(p) => Ok(p),
            None => self.error(at, ParseErrorKind::UnknownPlayer(token.to_string())),
        }
    }

    fn player(&mut self) -> PResult<PlayerId> {
        let (name, at) = self.name("player")?;
        self.resolve_player(&name, at)
    }

    fn action(&mut self, player: PlayerId) -> PResult<String> {
        let (name, at) = self.name("action")?;
        if self.vocab.game.action_index(player, &name).is_none() {
            return self.error(
                at,
                ParseErrorKind::UnknownAction { player: self.vocab.game.player_name(player).to_string(), action: name },
            );
        }
        Ok(name)
    }

    fn signal(&mut self) -> PResult<String> {
        let (name, at) = self.name("signal")?;
        if let Some(signals) = self.vocab.signals {
            if !signals.contains(&name) {
                return self.error(at, ParseErrorKind::UnknownSignal(name));
            }
        }
        Ok(name)
    }

    /// Player encoded after a reserved prefix, e.g. the `2` in `B_2`.
    fn prefixed_player(&self, ident: &str, prefix: &str, at: usize) -> PResult<PlayerId> {
        let rest = &ident[prefix.len()..];
        if rest.is_empty() {
            return self.error(
                at + prefix.len(),
                ParseErrorKind::Unexpected {
                    found: "nothing".into(),
                    expected: vec![format!("player after `{prefix}`")],
                },
            );
        }
        self.resolve_player(rest, at + prefix.len())
    }

    fn atom(&mut self) -> PResult<Formula> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => self.parenthesized(),
            Tok::Num(_) | Tok::Minus => self.prob(),
            Tok::Ident(id) => {
                if id.starts_with("pr_") {
                    return self.prob();
                }
                self.bump();
                match id.as_str() {
                    "pl" => {
                        self.expect(Tok::LParen)?;
                        let p = self.player()?;
                        self.expect(Tok::Comma)?;
                        let a = self.action(p)?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::play(p, a))
                    }
                    "rec" => {
                        self.expect(Tok::LParen)?;
                        let p = self.player()?;
                        self.expect(Tok::Comma)?;
                        let s = self.signal()?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::receive(p, s))
                    }
                    "CB" => Ok(Formula::common_belief(self.parenthesized()?)),
                    "EB" => {
                        let mut order = 1;
                        if *self.peek() == Tok::Caret {
                            self.bump();
                            let num_at = self.offset();
                            match self.peek().clone() {
                                Tok::Num(n) => {
                                    self.bump();
                                    order = match n.parse::<u32>() {
                                        Ok(m) if m >= 1 => m,
                                        _ => return self.error(num_at, ParseErrorKind::BadOrder(n)),
                                    };
                                }
                                _ => return self.unexpected(&["positive integer"]),
                            }
                        }
                        Ok(Formula::mutual_belief(order, self.parenthesized()?))
                    }
                    _ if id.starts_with("B_") => {
                        let p = self.prefixed_player(&id, "B_", at)?;
                        Ok(Formula::belief(p, self.parenthesized()?))
                    }
                    _ if id.starts_with("rat_") => Ok(Formula::rational(self.prefixed_player(&id, "rat_", at)?)),
                    _ if id.starts_with("opt_") => {
                        let p = self.prefixed_player(&id, "opt_", at)?;
                        self.expect(Tok::LParen)?;
                        let a = self.action(p)?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::optimal(p, a))
                    }
                    _ => {
                        if !is_atom_name(&id) || self.vocab.atoms.is_some_and(|atoms| !atoms.contains(&id)) {
                            return self.error(at, ParseErrorKind::UnknownAtom(id));
                        }
                        Ok(Formula::prim(id))
                    }
                }
            }
            _ => self.unexpected(&["formula"]),
        }
    }

    fn rational(&mut self) -> PResult<Rational> {
        let at = self.offset();
        let mut text = String::new();
        if *self.peek() == Tok::Minus {
            self.bump();
            text.push('-');
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                text.push_str(&n);
            }
            _ => return self.unexpected(&["number"]),
        }
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.peek().clone() {
                Tok::Num(d) => {
                    self.bump();
                    text.push('/');
                    text.push_str(&d);
                }
                _ => return self.unexpected(&["positive integer"]),
            }
        }
        parse_rational(&text).or_else(|_| self.error(at, ParseErrorKind::BadRational(text)))
    }

    fn pterm(&mut self) -> PResult<(Rational, PlayerId, Formula, usize)> {
        let coef = match self.peek() {
            Tok::Num(_) | Tok::Minus => {
                let c = self.rational()?;
                self.expect(Tok::Star)?;
                c
            }
            _ => Rational::one(),
        };
        let at = self.offset();
        let owner = match self.peek().clone() {
            Tok::Ident(id) if id.starts_with("pr_") => {
                self.bump();
                self.prefixed_player(&id, "pr_", at)?
            }
            _ => return self.unexpected(&["`pr_<player>`"]),
        };
        let body = self.parenthesized()?;
        Ok((coef, owner, body, at))
    }

    fn prob(&mut self) -> PResult<Formula> {
        let (coef, owner, body, _) = self.pterm()?;
        let mut terms = vec![(coef, body)];
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                Tok::Ge => break,
                _ => return self.unexpected(&["`+`", "`-`", "`>=`"]),
            };
            self.bump();
            let (coef, other, body, at) = self.pterm()?;
            if other != owner {
                return self.error(at, ParseErrorKind::MixedOwners);
            }
            terms.push((if negate { -coef } else { coef }, body));
        }
        self.expect(Tok::Ge)?;
        let bound = self.rational()?;
        Ok(Formula::prob_ge(owner, terms, bound))
    }
}

/// Parses a formula, validating identifiers against `vocab`. Sugar is kept.
pub fn parse(text: &str, vocab: &Vocabulary<'_>) -> Result<Formula, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0, vocab: *vocab };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return parser.unexpected(&["`&`", "`->`", "end of input"]);
    }
    Ok(f)
}

/// Parses a single primitive proposition such as `p`, `pl(1,T)` or `rec(2,s)`.
pub fn parse_atom(text: &str, vocab: &Vocabulary<'_>) -> Result<Atom, ParseError> {
    match parse(text, vocab)? {
        Formula::Atom(atom) => Ok(atom),
        other => Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Unexpected {
                found: format!("formula `{other}`"),
                expected: vec!["a primitive proposition".into()],
            },
        }),
    }
}
