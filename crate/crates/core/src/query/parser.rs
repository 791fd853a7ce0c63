use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Tok, Token};
use super::{ParseError, ParseOptions};

const AGGREGATES: [&str; 7] = ["FIRST", "LAST", "AVG", "COUNT", "SUM", "MIN", "MAX"];
const CLAUSES: [&str; 4] = ["GROUP", "ORDER", "HAVING", "LIMIT"];

/// Which identifier forms a pattern may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IdentMode {
    /// Quoted attribute values only.
    Simple,
    /// Behaviour names only.
    Behavioural,
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    options: ParseOptions,
}

impl Parser {
    pub(crate) fn new(text: &str, options: ParseOptions) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            options,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let token = &self.tokens[self.pos];
        ParseError::Syntax {
            line: token.line,
            column: token.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: token.tok.to_string(),
        }
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        let token = &self.tokens[self.pos];
        ParseError::UnsupportedFeature {
            construct: construct.to_owned(),
            line: token.line,
            column: token.column,
        }
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        *self.peek() == Tok::Kw(kw)
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&[kw.text()]))
        }
    }

    fn expect(&mut self, tok: Tok, label: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn check_unsupported(&self) -> Result<(), ParseError> {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(name), Tok::LParen)
                if AGGREGATES.iter().any(|a| a.eq_ignore_ascii_case(name)) =>
            {
                Err(self.unsupported(&name.to_ascii_uppercase()))
            }
            (Tok::LParen, Tok::Kw(Keyword::Select)) => Err(self.unsupported("subquery")),
            _ => Ok(()),
        }
    }

    fn var(&mut self) -> Result<String, ParseError> {
        self.check_unsupported()?;
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn constant(&mut self) -> Option<Constant> {
        let c = match self.peek() {
            Tok::Str(s) => Constant::Str(s.clone()),
            Tok::Int(n) => Constant::Int(*n),
            _ => return None,
        };
        self.bump();
        Some(c)
    }

    pub(crate) fn query(&mut self) -> Result<Query, ParseError> {
        self.expect_kw(Keyword::Select)?;
        let mut projection = vec![self.var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            projection.push(self.var()?);
        }
        self.expect_kw(Keyword::From)?;
        let source = self.var()?;
        let mut conditions = Vec::new();
        if self.eat_kw(Keyword::Where) {
            conditions.push(self.condition()?);
            while self.eat_kw(Keyword::And) {
                conditions.push(self.condition()?);
            }
        }
        if let Tok::Ident(word) = self.peek() {
            if let Some(clause) = CLAUSES.iter().find(|c| c.eq_ignore_ascii_case(word)) {
                return Err(self.unsupported(clause));
            }
        }
        if *self.peek() != Tok::Eof {
            let mut expected = vec!["AND", "end of input"];
            if conditions.is_empty() {
                expected[0] = "WHERE";
            }
            return Err(self.error(&expected));
        }
        Ok(Query {
            projection,
            source,
            conditions,
        })
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        if self.eat_kw(Keyword::Behaviour) {
            let defs = self.behaviours()?;
            self.expect_kw(Keyword::Matches)?;
            let pattern = self.pattern(IdentMode::Behavioural)?;
            return Ok(Condition::BehaviourMatch(defs, pattern));
        }
        let left = self.var()?;
        if self.eat_kw(Keyword::Matches) {
            let pattern = self.pattern(IdentMode::Simple)?;
            return Ok(Condition::SimpleMatch(left, pattern));
        }
        self.expect(Tok::Eq, "`=` or MATCHES")?;
        self.check_unsupported()?;
        if let Some(c) = self.constant() {
            return Ok(Condition::AttrEqConst(left, c));
        }
        match self.peek().clone() {
            Tok::Ident(right) => {
                self.bump();
                Ok(Condition::AttrEqAttr(left, right))
            }
            _ => Err(self.error(&["identifier", "constant"])),
        }
    }

    fn behaviours(&mut self) -> Result<Vec<BehaviourDef>, ParseError> {
        let mut defs = Vec::new();
        let mut names = HashSet::new();
        loop {
            let mut conjuncts = vec![self.equality()?];
            while self.eat_kw(Keyword::And) {
                conjuncts.push(self.equality()?);
            }
            self.expect_kw(Keyword::As)?;
            let name = self.var()?;
            if !names.insert(name.clone()) {
                return Err(ParseError::DuplicateBehaviour(name));
            }
            defs.push(BehaviourDef { name, conjuncts });
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        if let Some(limit) = self.options.max_behaviours {
            if defs.len() > limit {
                return Err(ParseError::TooManyBehaviours {
                    limit,
                    found: defs.len(),
                });
            }
        }
        Ok(defs)
    }

    fn equality(&mut self) -> Result<Equality, ParseError> {
        let left = self.var()?;
        self.expect(Tok::Eq, "`=`")?;
        if !self.options.strict_grammar {
            if let Some(c) = self.constant() {
                return Ok(Equality::AttrConst(left, c));
            }
        }
        match self.peek().clone() {
            Tok::Ident(right) => {
                self.bump();
                Ok(Equality::AttrAttr(left, right))
            }
            _ if self.options.strict_grammar => Err(self.error(&["identifier"])),
            _ => Err(self.error(&["identifier", "constant"])),
        }
    }

    pub(crate) fn standalone_pattern(&mut self) -> Result<PatternFormula, ParseError> {
        let p = self.pattern(IdentMode::Simple)?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(&["`->`", "`~>`", "`*`", "END", "end of input"]));
        }
        Ok(p)
    }

    // follows := directly (~> directly)*
    fn pattern(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        let mut left = self.directly(mode)?;
        while *self.peek() == Tok::Wiggle {
            self.bump();
            let right = self.directly(mode)?;
            left = PatternFormula::follows(left, right);
        }
        Ok(left)
    }

    // directly := prefix (-> prefix)*
    fn directly(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        let mut left = self.prefix(mode)?;
        while *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.prefix(mode)?;
            left = PatternFormula::directly_follows(left, right);
        }
        Ok(left)
    }

    // prefix := START prefix | postfix
    fn prefix(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        if self.eat_kw(Keyword::Start) {
            return Ok(PatternFormula::start(self.prefix(mode)?));
        }
        self.postfix(mode)
    }

    // postfix := primary (* | END)*
    fn postfix(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        let mut p = self.primary(mode)?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
                p = PatternFormula::star(p);
            } else if self.eat_kw(Keyword::End) {
                p = PatternFormula::end(p);
            } else {
                return Ok(p);
            }
        }
    }

    // primary := ANY | atom (OR atom)*
    fn primary(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        if self.eat_kw(Keyword::Any) {
            return Ok(PatternFormula::Any);
        }
        let first = self.atom(mode)?;
        if !self.at_kw(Keyword::Or) {
            return Ok(first);
        }
        let mut acc = self.require_identifier(first)?;
        while self.eat_kw(Keyword::Or) {
            let next = self.atom(mode)?;
            acc = IdentifierExpr::or(acc, self.require_identifier(next)?);
        }
        Ok(PatternFormula::Id(acc))
    }

    fn require_identifier(&self, p: PatternFormula) -> Result<IdentifierExpr, ParseError> {
        match p {
            PatternFormula::Id(idx) => Ok(idx),
            _ => Err(self.error(&["identifier operand of OR"])),
        }
    }

    // atom := ( pattern ) | NOT ( pattern ) | string | name
    fn atom(&mut self, mode: IdentMode) -> Result<PatternFormula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.pattern(mode)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Kw(Keyword::Not) => {
                let (line, column) = (self.tokens[self.pos].line, self.tokens[self.pos].column);
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let inner = self.pattern(mode)?;
                self.expect(Tok::RParen, "`)`")?;
                match inner {
                    PatternFormula::Id(idx) => Ok(PatternFormula::Id(IdentifierExpr::not(idx))),
                    _ => Err(ParseError::NegatedPattern { line, column }),
                }
            }
            Tok::Str(value) if mode == IdentMode::Simple => {
                self.bump();
                Ok(PatternFormula::lit(value))
            }
            Tok::Ident(name) if mode == IdentMode::Behavioural => {
                self.bump();
                Ok(PatternFormula::reference(name))
            }
            _ => Err(match mode {
                IdentMode::Simple => self.error(&["quoted value", "ANY", "NOT", "START", "`(`"]),
                IdentMode::Behavioural => {
                    self.error(&["behaviour name", "ANY", "NOT", "START", "`(`"])
                }
            }),
        }
    }
}
