//! The `.behavior` text format.
//!
//! ```text
//! model OrderProcessing {
//!     initial InitialNode1;
//!     action VerifyCreditCard "Verify credit card";
//!     decision DecisionNode1;
//!     InitialNode1 -> VerifyCreditCard;
//!     DecisionNode1 -> ShipOrder [card ok];
//! }
//! ```
//!
//! Declarations may appear in any order and the `;` before the closing
//! brace is optional. `//` starts a comment that runs to the end of line.

use std::fmt::Write as _;
use std::path::Path;

use super::{ErrorLocation, ParseError, SourceSpan};
use crate::model::{ActivityModel, Edge, Location, Node, NodeKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Guard(String),
    Semi,
    LBrace,
    RBrace,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Str(_) => "string literal".into(),
            Tok::Guard(_) => "guard".into(),
            Tok::Semi => "';'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

/// Tokens and lexical errors.
type Lexed = (Vec<(Tok, Pos)>, Vec<(Pos, String)>);

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
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

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    /// Tokenizes everything; lexical errors are collected and the offending
    /// characters skipped.
    fn run(mut self) -> Lexed {
        let mut toks = Vec::new();
        let mut errors = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '/' {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if ahead.peek() == Some(&'/') {
                        while let Some(&c) = self.chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
            let start = self.pos();
            let Some(c) = self.bump() else {
                toks.push((Tok::Eof, start));
                break;
            };
            match c {
                ';' => toks.push((Tok::Semi, start)),
                '{' => toks.push((Tok::LBrace, start)),
                '}' => toks.push((Tok::RBrace, start)),
                '-' if self.chars.peek() == Some(&'>') => {
                    self.bump();
                    toks.push((Tok::Arrow, start));
                }
                '[' => {
                    let mut text = String::new();
                    let mut closed = false;
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                        if c == ']' {
                            closed = true;
                            break;
                        }
                        text.push(c);
                    }
                    if closed {
                        toks.push((Tok::Guard(text.trim().to_string()), start));
                    } else {
                        errors.push((start, "unterminated guard: missing ']' before end of line".into()));
                    }
                }
                '"' => {
                    let mut text = String::new();
                    let mut closed = false;
                    while let Some(c) = self.bump() {
                        match c {
                            '"' => {
                                closed = true;
                                break;
                            }
                            '\\' => match self.bump() {
                                Some(e @ ('"' | '\\')) => text.push(e),
                                Some(e) => {
                                    errors.push((self.pos(), format!("unknown escape '\\{e}' in string")))
                                }
                                None => break,
                            },
                            '\n' => break,
                            c => text.push(c),
                        }
                    }
                    if closed {
                        toks.push((Tok::Str(text), start));
                    } else {
                        errors.push((start, "unterminated string literal".into()));
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut word = String::from(c);
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    toks.push((Tok::Ident(word), start));
                }
                c => errors.push((start, format!("unexpected character '{c}'"))),
            }
        }
        (toks, errors)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    origin: &'a Path,
    errors: Vec<ParseError>,
}

struct Parsed {
    name: String,
    name_pos: Pos,
    nodes: Vec<(Node, Pos)>,
    /// Edge plus the positions of its source and target references.
    edges: Vec<(Edge, Pos, Pos)>,
}

impl<'a> Parser<'a> {
    fn span(&self, pos: Pos) -> ErrorLocation {
        ErrorLocation::Span(SourceSpan {
            file: self.origin.to_path_buf(),
            line: pos.line,
            column: pos.column,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail(&mut self, expected: &[&str]) {
        let found = self.peek().describe();
        let mut err = ParseError::new(self.span(self.pos()), format!("unexpected {found}"));
        err.expected = expected.iter().map(|s| s.to_string()).collect();
        self.errors.push(err);
    }

    fn expect_ident(&mut self, what: &str) -> Option<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let (_, pos) = self.advance();
                Some((s, pos))
            }
            _ => {
                self.fail(&[what]);
                None
            }
        }
    }

    /// Skips to just past the next `;`, or up to a `}` / end of input.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Semi => {
                    self.advance();
                    return;
                }
                Tok::RBrace | Tok::Eof => return,
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn terminator(&mut self) -> bool {
        match self.peek() {
            Tok::Semi => {
                self.advance();
                true
            }
            Tok::RBrace => true,
            _ => {
                self.fail(&["';'", "'}'"]);
                self.recover();
                false
            }
        }
    }

    fn file(&mut self) -> Option<Parsed> {
        match self.peek() {
            Tok::Ident(w) if w == "model" => {
                self.advance();
            }
            _ => {
                self.fail(&["'model'"]);
                return None;
            }
        }
        let (name, name_pos) = self.expect_ident("model name")?;
        if *self.peek() != Tok::LBrace {
            self.fail(&["'{'"]);
            return None;
        }
        self.advance();

        let mut out = Parsed {
            name,
            name_pos,
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Eof => {
                    self.fail(&["'}'"]);
                    return Some(out);
                }
                Tok::Ident(word) => {
                    let kind = NodeKind::from_keyword(&word);
                    if let (Some(kind), Tok::Ident(_)) = (kind, self.peek2()) {
                        self.advance();
                        let Some((id, pos)) = self.expect_ident("node id") else {
                            self.recover();
                            continue;
                        };
                        let mut node = Node::new(id, kind);
                        if let Tok::Str(s) = self.peek().clone() {
                            self.advance();
                            node.name = s;
                        }
                        if self.terminator() {
                            out.nodes.push((node, pos));
                        }
                    } else {
                        let (source, spos) = self.advance();
                        let Tok::Ident(source) = source else { unreachable!() };
                        if *self.peek() != Tok::Arrow {
                            if NodeKind::from_keyword(&source).is_none() {
                                self.fail(&["'->'"]);
                            } else {
                                self.fail(&["node id", "'->'"]);
                            }
                            self.recover();
                            continue;
                        }
                        self.advance();
                        let Some((target, tpos)) = self.expect_ident("node id") else {
                            self.recover();
                            continue;
                        };
                        let mut edge = Edge::new(source, target);
                        if let Tok::Guard(g) = self.peek().clone() {
                            self.advance();
                            edge.guard = Some(g);
                        }
                        if self.terminator() {
                            out.edges.push((edge, spos, tpos));
                        }
                    }
                }
                _ => {
                    let mut expected = vec!["'}'", "edge"];
                    expected.extend(NodeKind::ALL.iter().map(|k| k.keyword()));
                    self.fail(&expected);
                    self.advance();
                    self.recover();
                }
            }
        }
        if *self.peek() != Tok::Eof {
            self.fail(&["end of input"]);
        }
        Some(out)
    }
}

/// Parses DSL text into a validated model. `origin` only labels spans.
pub fn parse_dsl(text: &str, origin: &Path) -> Result<ActivityModel, Vec<ParseError>> {
    let (toks, lex_errors) = Lexer::new(text).run();
    let mut parser = Parser {
        toks,
        at: 0,
        origin,
        errors: Vec::new(),
    };
    for (pos, msg) in lex_errors {
        let loc = parser.span(pos);
        parser.errors.push(ParseError::new(loc, msg));
    }
    let parsed = parser.file();
    let Some(parsed) = parsed else {
        return Err(parser.errors);
    };
    if !parser.errors.is_empty() {
        return Err(parser.errors);
    }

    let node_pos: Vec<Pos> = parsed.nodes.iter().map(|(_, p)| *p).collect();
    let edge_pos: Vec<(Pos, Pos)> = parsed.edges.iter().map(|(_, s, t)| (*s, *t)).collect();
    let model = ActivityModel::new(
        parsed.name,
        parsed.nodes.into_iter().map(|(n, _)| n).collect(),
        parsed.edges.into_iter().map(|(e, _, _)| e).collect(),
    );
    let report = model.validate();
    if report.is_valid() {
        return Ok(model);
    }
    let errors = report
        .violations
        .into_iter()
        .map(|v| {
            let pos = match &v.location {
                Location::Model => parsed.name_pos,
                Location::Node(i, _) => node_pos[*i],
                Location::Edge(e) => {
                    // Point at the endpoint the message is about.
                    let edge = &model.edges()[*e];
                    if v.message.contains(&format!("'{}'", edge.target))
                        && !v.message.contains(&format!("'{}'", edge.source))
                    {
                        edge_pos[*e].1
                    } else {
                        edge_pos[*e].0
                    }
                }
            };
            ParseError::new(parser.span(pos), v.message)
        })
        .collect();
    Err(errors)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Canonical DSL text: node declarations first, then edges, both in model
/// order.
pub fn print_dsl(model: &ActivityModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", model.name());
    for node in model.nodes() {
        let _ = write!(out, "    {} {}", node.kind.keyword(), node.id);
        if node.name != node.id {
            let _ = write!(out, " {}", quote(&node.name));
        }
        out.push_str(";\n");
    }
    if !model.edges().is_empty() {
        out.push('\n');
    }
    for edge in model.edges() {
        let _ = write!(out, "    {} -> {}", edge.source, edge.target);
        if let Some(g) = &edge.guard {
            let _ = write!(out, " [{g}]");
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn parse(text: &str) -> Result<ActivityModel, Vec<ParseError>> {
        parse_dsl(text, Path::new("test.behavior"))
    }

    fn span_of(err: &ParseError) -> (usize, usize) {
        match &err.location {
            ErrorLocation::Span(s) => (s.line, s.column),
            other => panic!("expected span, got {other:?}"),
        }
    }

    #[test]
    fn minimal_model() {
        let m = parse("model M { initial I; final F; I -> F }").unwrap();
        assert_eq!(m.name(), "M");
        assert_eq!(m.nodes().len(), 2);
        assert_eq!(m.edges(), &[Edge::new("I", "F")]);
    }

    #[test]
    fn dangling_edge_points_at_the_unknown_reference() {
        let errs = parse("model M {\n  initial I;\n  final F;\n  I -> F;\n  I -> Unknown;\n}").unwrap_err();
        let e = errs
            .iter()
            .find(|e| e.message == "unknown node reference 'Unknown'")
            .expect("dangling reference reported");
        assert_eq!(span_of(e), (5, 8));
        assert_eq!(
            e.location,
            ErrorLocation::Span(SourceSpan {
                file: PathBuf::from("test.behavior"),
                line: 5,
                column: 8
            })
        );
    }

    #[test]
    fn guards_names_and_comments() {
        let text = r#"
// order flow
model M {
    initial I;
    decision D "Check \"stock\"";
    action A; // trailing
    final F1;
    final F2;
    I -> D;
    D -> A [ in stock ];
    D -> F2 [else];
    A -> F1;
}
"#;
        let m = parse(text).unwrap();
        assert_eq!(m.node("D").unwrap().name, "Check \"stock\"");
        assert_eq!(m.edges()[1].guard.as_deref(), Some("in stock"));
        assert_eq!(m.edges()[2].guard.as_deref(), Some("else"));
        let again = parse(&print_dsl(&m)).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn syntax_errors_carry_expected_tokens() {
        let errs = parse("model M { initial I; final F; I => F; }").unwrap_err();
        assert!(!errs.is_empty());
        assert!(errs[0].message.contains("unexpected character '='"), "{errs:?}");

        let errs = parse("model M { initial I final F; }").unwrap_err();
        assert_eq!(errs[0].expected, vec!["';'", "'}'"]);
        assert_eq!(span_of(&errs[0]), (1, 21));
    }

    #[test]
    fn unknown_kind_keyword_is_a_syntax_error() {
        let errs = parse("model M { loop L; }").unwrap_err();
        assert!(errs[0].message.contains("unexpected identifier 'L'"), "{errs:?}");
        assert_eq!(errs[0].expected, vec!["'->'"]);
    }

    #[test]
    fn unterminated_guard_and_string() {
        let errs = parse("model M { decision D \"x; D -> A [oops\n}").unwrap_err();
        let msgs: Vec<_> = errs.iter().map(|e| e.message.as_str()).collect();
        assert!(msgs.iter().any(|m| m.contains("unterminated string")));
    }

    #[test]
    fn validation_errors_have_spans() {
        let errs = parse("model M {\n initial I;\n decision D;\n final F;\n I -> D;\n D -> F;\n}").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("requires ≥2 outgoing edges"));
        assert_eq!(span_of(&errs[0]), (3, 11));
    }

    #[test]
    fn printing_is_stable() {
        let m = parse("model M { initial I; final F; I -> F }").unwrap();
        let text = print_dsl(&m);
        assert_eq!(text, "model M {\n    initial I;\n    final F;\n\n    I -> F;\n}\n");
        assert_eq!(print_dsl(&parse(&text).unwrap()), text);
    }
}
