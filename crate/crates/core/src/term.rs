//! Terms over a finite signature, with a prefix text form.
//!
//! Text form: variables are `v1`, `v2`, ..; applications are parenthesized
//! prefix lists `(op t1 .. tk)`. A bare operation name is accepted as
//! shorthand for a nullary application.
//!
//! The same tree doubles as a ground constant-indexed term: read `Var(i)` as
//! the i-th distinguished constant instead of the i-th variable. The
//! translation between the two readings is the identity on trees.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// 1-based variable index.
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    /// Largest variable index appearing in the term (0 for ground terms).
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Nesting depth: variables have depth 0, an application is one more
    /// than its deepest argument (nullary applications have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replaces each operation node by a template term: the node `f(t1..tk)`
    /// becomes `templates(f)` with its variables `v1..vk` substituted by the
    /// rewritten arguments. Variables of `self` are kept as they are.
    pub fn rewrite_ops(&self, templates: &impl Fn(&str) -> Option<Term>) -> Result<Term> {
        match self {
            Term::Var(i) => Ok(Term::Var(*i)),
            Term::App(name, args) => {
                let rewritten: Vec<Term> = args
                    .iter()
                    .map(|a| a.rewrite_ops(templates))
                    .collect::<Result<_>>()?;
                let template = templates(name)
                    .ok_or_else(|| Error::UnknownOperation(name.clone()))?;
                template.substitute(&rewritten)
            }
        }
    }

    /// Substitutes `args[i-1]` for each variable `vi`. Variables above the
    /// supplied argument list are left in place (used by constant templates
    /// whose value does not read them).
    pub fn substitute(&self, args: &[Term]) -> Result<Term> {
        match self {
            Term::Var(i) => Ok(args.get(i - 1).cloned().unwrap_or(Term::Var(*i))),
            Term::App(name, ts) => {
                let subs: Vec<Term> = ts
                    .iter()
                    .map(|t| t.substitute(args))
                    .collect::<Result<_>>()?;
                Ok(Term::App(name.clone(), subs))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Term> {
        let tokens = tokenize(text)?;
        let mut pos = 0usize;
        let t = parse_term(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::TermParse(format!(
                "trailing input after term: {:?}",
                tokens[pos..].join(" ")
            )));
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "v{i}"),
            Term::App(name, args) => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word));
                }
            }
            c => word.push(c),
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    if tokens.is_empty() {
        return Err(Error::TermParse("empty input".into()));
    }
    Ok(tokens)
}

fn parse_term(tokens: &[String], pos: &mut usize) -> Result<Term> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::TermParse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let head = tokens
                .get(*pos)
                .ok_or_else(|| Error::TermParse("missing operation name after '('".into()))?;
            if head == "(" || head == ")" {
                return Err(Error::TermParse(format!(
                    "expected operation name, found {head:?}"
                )));
            }
            let name = head.clone();
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Term::App(name, args));
                    }
                    Some(_) => args.push(parse_term(tokens, pos)?),
                    None => {
                        return Err(Error::TermParse("missing closing ')'".into()));
                    }
                }
            }
        }
        ")" => Err(Error::TermParse("unexpected ')'".into())),
        word => {
            if let Some(rest) = word.strip_prefix('v') {
                if let Ok(i) = rest.parse::<usize>() {
                    if i == 0 {
                        return Err(Error::TermParse("variables are 1-based: v0".into()));
                    }
                    return Ok(Term::Var(i));
                }
            }
            // bare name = nullary application
            Ok(Term::App(word.to_string(), vec![]))
        }
    }
}
