//! Reader for rule files.
//!
//! ```text
//! clause      := atom ( ":-" atomlist )? ( "#" featurelist )? "."
//! atomlist    := atom ("," atom)* | "true"
//! featurelist := atom ("," atom)*
//! ```
//!
//! Variables start with an uppercase letter or `_`; constants are
//! lowercase identifiers, numbers, or quoted strings. `%` starts a comment.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::clause::{default_feature, Clause, Program};
use crate::logic::term::{Atom, Term};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Var(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Hash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(s) | Tok::Var(s) => format!("'{s}'"),
            Tok::Quoted(s) => format!("quoted '{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Neck => "':-'".into(),
            Tok::Hash => "'#'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Next token with its starting position.
    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok((Tok::Eof, line, column));
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '#' => Tok::Hash,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Tok::Neck
                } else {
                    return Err(self.error(line, column, "expected ':-'"));
                }
            }
            '\'' | '"' => Tok::Quoted(self.quoted(c, line, column)?),
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&n) = self.chars.peek() {
                    if n.is_alphanumeric() || n == '_' {
                        s.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if c.is_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Name(s)
                }
            }
            other => {
                return Err(self.error(line, column, format!("unexpected character '{other}'")))
            }
        };
        Ok((tok, line, column))
    }

    fn quoted(&mut self, delim: char, line: usize, column: usize) -> Result<String> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, column, "unterminated quoted constant")),
                Some(c) if c == delim => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c) => s.push(c),
                    None => return Err(self.error(line, column, "unterminated quoted constant")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, usize, usize)>,
    vars: HashMap<String, u32>,
    next_var: u32,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            peeked: None,
            vars: HashMap::new(),
            next_var: 0,
        }
    }

    fn peek(&mut self) -> Result<&Tok> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(&self.peeked.as_ref().unwrap().0)
    }

    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (tok, line, column) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(Error::Syntax {
                line,
                column,
                message: format!("expected {}, found {}", want.describe(), tok.describe()),
            })
        }
    }

    fn reset_vars(&mut self) {
        self.vars.clear();
        self.next_var = 0;
    }

    fn fresh(&mut self) -> u32 {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn term(&mut self) -> Result<Term> {
        let (tok, line, column) = self.next()?;
        match tok {
            Tok::Name(s) | Tok::Quoted(s) => Ok(Term::Const(Symbol::intern(&s))),
            Tok::Var(s) if s == "_" => Ok(Term::Var(self.fresh())),
            Tok::Var(s) => {
                if let Some(&v) = self.vars.get(&s) {
                    return Ok(Term::Var(v));
                }
                let v = self.fresh();
                self.vars.insert(s, v);
                Ok(Term::Var(v))
            }
            other => Err(Error::Syntax {
                line,
                column,
                message: format!("expected a term, found {}", other.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let (tok, line, column) = self.next()?;
        let predicate = match tok {
            Tok::Name(s) | Tok::Quoted(s) => Symbol::intern(&s),
            other => {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("expected a predicate name, found {}", other.describe()),
                })
            }
        };
        let mut args = Vec::new();
        if *self.peek()? == Tok::LParen {
            self.next()?;
            loop {
                args.push(self.term()?);
                let (tok, line, column) = self.next()?;
                match tok {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => {
                        return Err(Error::Syntax {
                            line,
                            column,
                            message: format!("expected ',' or ')', found {}", other.describe()),
                        })
                    }
                }
            }
        }
        Ok(Atom { predicate, args })
    }

    fn atom_list(&mut self) -> Result<Vec<Atom>> {
        let mut atoms = vec![self.atom()?];
        while *self.peek()? == Tok::Comma {
            self.next()?;
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn clause(&mut self, index: usize) -> Result<Clause> {
        self.reset_vars();
        let head = self.atom()?;
        let mut body = Vec::new();
        if *self.peek()? == Tok::Neck {
            self.next()?;
            body = self.atom_list()?;
            if body.len() == 1 && body[0].predicate.as_str() == "true" && body[0].args.is_empty() {
                body.clear();
            }
        }
        let id = Symbol::intern(&format!("c{index}"));
        let features = if *self.peek()? == Tok::Hash {
            self.next()?;
            self.atom_list()?
        } else {
            vec![default_feature(id)]
        };
        self.expect(Tok::Dot)?;
        Ok(Clause {
            id,
            head,
            body,
            features,
        })
    }
}

/// Parses clauses in source order; clause `k` (1-based) is identified as `ck`.
pub fn parse_clauses(source: &str) -> Result<Vec<Clause>> {
    let mut parser = Parser::new(source);
    let mut clauses = Vec::new();
    while *parser.peek()? != Tok::Eof {
        clauses.push(parser.clause(clauses.len() + 1)?);
    }
    Ok(clauses)
}

pub fn parse_program(source: &str) -> Result<Program> {
    Program::from_clauses(parse_clauses(source)?)
}

/// Parses a conjunctive query such as `about(a,Z)` or `p(X),q(X).`.
pub fn parse_query(source: &str) -> Result<Vec<Atom>> {
    let mut parser = Parser::new(source);
    let atoms = parser.atom_list()?;
    if *parser.peek()? == Tok::Dot {
        parser.next()?;
    }
    parser.expect(Tok::Eof)?;
    Ok(atoms)
}

/// Parses a single atom (ground or not).
pub fn parse_atom(source: &str) -> Result<Atom> {
    let mut parser = Parser::new(source);
    let atom = parser.atom()?;
    parser.expect(Tok::Eof)?;
    Ok(atom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annotated_clause() {
        let p = parse_program("p(X) :- q(X) # f.").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(c.head.to_string(), "p(V0)");
        assert_eq!(c.body.len(), 1);
        assert_eq!(c.body[0].to_string(), "q(V0)");
        assert_eq!(c.features, vec![Atom::new("f", vec![])]);
    }

    #[test]
    fn unannotated_clause_gets_id_feature() {
        let p = parse_program("p(X) :- q(X).").unwrap();
        assert_eq!(p.clauses()[0].features[0].to_string(), "id(c1)");
    }

    #[test]
    fn true_body_is_empty() {
        let p = parse_program("linkedBy(X,Y,W) :- true # by(W).").unwrap();
        let c = &p.clauses()[0];
        assert!(c.body.is_empty());
        assert_eq!(c.features[0].to_string(), "by(V2)");
    }

    #[test]
    fn table_one_program() {
        let src = "
            about(X,Z) :- handLabeled(X,Z)  # base.
            about(X,Z) :- sim(X,Y),about(Y,Z) # prop.
            sim(X,Y) :- links(X,Y) # sim,link.
            sim(X,Y) :-
                hasWord(X,W),hasWord(Y,W),
                linkedBy(X,Y,W) # sim,word.
            linkedBy(X,Y,W) :- true # by(W).
        ";
        let p = parse_program(src).unwrap();
        assert_eq!(p.clauses().len(), 5);
        assert_eq!(p.clauses_for(Symbol::intern("sim")).count(), 2);
        assert_eq!(p.clauses()[2].features.len(), 2);
        assert_eq!(p.clauses()[4].id.as_str(), "c5");
    }

    #[test]
    fn comments_and_quotes() {
        let p = parse_program("% header\np('New York', \"x y\") :- true. % trailing\n").unwrap();
        assert_eq!(p.clauses()[0].head.to_string(), "p('New York','x y')");
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let p = parse_program("p(_, _) :- q(_).").unwrap();
        let vars: Vec<u32> = p.clauses()[0].head.vars().collect();
        assert_ne!(vars[0], vars[1]);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_program("p(X) :- q(X)\nr(Y).").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 1)),
            e => panic!("unexpected {e}"),
        }
        let err = parse_program("p(X :- q.").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, column: 5, .. }));
    }

    #[test]
    fn arity_conflict_is_a_load_error() {
        let err = parse_program("p(X) :- q(X). q(X,Y) :- true.").unwrap_err();
        assert!(matches!(err, Error::Arity { .. }));
    }

    #[test]
    fn query_parsing() {
        let q = parse_query("about(a,Z).").unwrap();
        assert_eq!(q.len(), 1);
        assert!(parse_query("about(a,Z) extra").is_err());
        assert_eq!(parse_atom("samebib(c1,c2)").unwrap().arity(), 2);
    }
}
