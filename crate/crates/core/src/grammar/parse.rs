use std::collections::HashMap;

use super::{Alternative, Grammar, GrammarError, Rule, Symbol};
use crate::expr::{OpId, Punct};

/// Removes a `#` comment, ignoring `#` inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '\'' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Byte offset of `=>` outside quotes.
fn find_arrow(line: &str) -> Option<usize> {
    let mut quoted = false;
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'\'' => quoted = !quoted,
            b'=' if !quoted && bytes.get(i + 1) == Some(&b'>') => return Some(i),
            _ => {}
        }
    }
    None
}

struct RawRule {
    lhs: String,
    line: usize,
    rhs: Vec<(char, usize)>,
}

#[derive(Debug)]
enum Tok {
    Ident(String),
    Quoted(String),
}

fn is_ident(ch: char) -> bool {
    ch.is_ascii_alphanumeric() || ch == '_'
}

/// Tokens of one alternative (with source lines) and the line it starts on.
type TokenizedAlt = (Vec<(Tok, usize)>, usize);

/// Splits a rule body into alternatives of tokens, dropping elided ones.
fn tokenize(rhs: &[(char, usize)]) -> Result<Vec<TokenizedAlt>, GrammarError> {
    let mut alts = Vec::new();
    let mut current: Vec<(Tok, usize)> = Vec::new();
    let mut current_line = rhs.first().map_or(0, |c| c.1);
    let mut elided = false;
    let mut i = 0;
    while i < rhs.len() {
        let (ch, line) = rhs[i];
        if ch == '|' {
            if !elided {
                alts.push((std::mem::take(&mut current), current_line));
            }
            current.clear();
            elided = false;
            i += 1;
            current_line = rhs.get(i).map_or(line, |c| c.1);
            continue;
        }
        if elided {
            if ch == '\'' {
                // skip quoted text so a quoted '|' cannot end the elision
                i += 1;
                while i < rhs.len() && rhs[i].0 != '\'' {
                    i += 1;
                }
            }
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
        } else if ch == '\'' {
            let start = i + 1;
            let mut end = start;
            while end < rhs.len() && rhs[end].0 != '\'' {
                if rhs[end].1 != line {
                    return Err(GrammarError::UnterminatedQuote { line });
                }
                end += 1;
            }
            if end >= rhs.len() {
                return Err(GrammarError::UnterminatedQuote { line });
            }
            let text: String = rhs[start..end].iter().map(|c| c.0).collect();
            current.push((Tok::Quoted(text), line));
            i = end + 1;
        } else if rhs[i..].iter().take(3).map(|c| c.0).eq("...".chars()) {
            elided = true;
            current.clear();
            i += 3;
        } else if is_ident(ch) {
            let start = i;
            while i < rhs.len() && is_ident(rhs[i].0) {
                i += 1;
            }
            current.push((Tok::Ident(rhs[start..i].iter().map(|c| c.0).collect()), line));
        } else {
            return Err(GrammarError::UnexpectedChar { line, ch });
        }
    }
    if !elided {
        alts.push((current, current_line));
    }
    Ok(alts)
}

pub(super) fn parse(text: &str) -> Result<Grammar, GrammarError> {
    let mut raw: Vec<RawRule> = Vec::new();
    for (lineno, physical) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = strip_comment(physical);
        if body.trim().is_empty() {
            continue;
        }
        let chars = |s: &str| s.chars().map(|c| (c, line)).collect::<Vec<_>>();
        match find_arrow(body) {
            Some(at) => {
                let lhs = body[..at].trim();
                if lhs.is_empty() || !lhs.chars().all(is_ident) {
                    return Err(GrammarError::BadLhs { line, text: lhs.to_string() });
                }
                raw.push(RawRule { lhs: lhs.to_string(), line, rhs: chars(&body[at + 2..]) });
            }
            None => {
                let rule = raw.last_mut().ok_or(GrammarError::MissingArrow { line })?;
                rule.rhs.push((' ', line));
                rule.rhs.extend(chars(body));
            }
        }
    }
    if raw.is_empty() {
        return Err(GrammarError::Empty);
    }

    let mut order: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for r in &raw {
        if !index.contains_key(&r.lhs) {
            index.insert(r.lhs.clone(), order.len());
            order.push(r.lhs.clone());
        }
    }

    let mut rules: Vec<Rule> = order
        .iter()
        .map(|name| Rule { name: name.clone(), alternatives: Vec::new() })
        .collect();
    for r in &raw {
        let target = index[&r.lhs];
        for (toks, line) in tokenize(&r.rhs)? {
            if toks.is_empty() {
                return Err(GrammarError::EmptyAlternative { line: if line == 0 { r.line } else { line }, rule: r.lhs.clone() });
            }
            let mut symbols = Vec::with_capacity(toks.len());
            for (tok, line) in toks {
                let sym = match tok {
                    Tok::Ident(name) => match index.get(&name) {
                        Some(&i) => Symbol::Nonterminal(i),
                        None => return Err(GrammarError::Undefined { name, by: r.lhs.clone() }),
                    },
                    Tok::Quoted(t) => terminal(&t).ok_or(GrammarError::UnknownTerminal { line, text: t })?,
                };
                symbols.push(sym);
            }
            rules[target].alternatives.push(Alternative { symbols, enabled: true });
        }
    }
    Grammar::from_rules(rules, text.to_string())
}

fn terminal(text: &str) -> Option<Symbol> {
    match text {
        "VC" => Some(Symbol::Vc),
        "W" => Some(Symbol::Weight),
        _ => Punct::from_terminal(text)
            .map(Symbol::Punct)
            .or_else(|| OpId::from_terminal(text).map(Symbol::Op)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The grammar exactly as it is usually written out, ellipses included.
    const VERBATIM: &str = "\
REPVC => 'VC' | REPVC '*' REPOP | REPOP
REPOP => REPOP '*' REPOP | 1OP '(' 'W' '+'
REPADD ')' | 2OP '(' 2ARGS ')' | ... 3OP, 4OP
etc
2ARGS => 'W' '+' REPADD ',' MAYBEW | MAYBEW ','
'W' '+' REPADD
MAYBEW => 'W' | 'W' '+' REPADD
REPADD => 'W' '*' REPVC | REPADD '+' REPADD
2OP => 'DIVIDE' | 'POW' | 'MAX' | ...
1OP => 'INV' | 'LOG10' | ...
";

    #[test]
    fn verbatim_text() {
        let g = parse(VERBATIM).unwrap();
        assert_eq!(g.rules().len(), 7);
        assert_eq!(g.start_name(), "REPVC");
        let repop = g.rule(g.rule_index("REPOP").unwrap());
        assert_eq!(repop.alternatives.len(), 3);
        assert_eq!(repop.alternatives[1].symbols.len(), 6);
        assert_eq!(g.rule(g.rule_index("2OP").unwrap()).alternatives.len(), 3);
        assert_eq!(g.rule(g.rule_index("2ARGS").unwrap()).alternatives[1].symbols.len(), 5);
    }

    #[test]
    fn undefined_nonterminal_is_named() {
        let err = parse("A => 'VC' | B").unwrap_err();
        assert_eq!(err, GrammarError::Undefined { name: "B".into(), by: "A".into() });
        assert!(err.to_string().contains('B'));
    }

    #[test]
    fn error_cases() {
        assert_eq!(parse("").unwrap_err(), GrammarError::Empty);
        assert_eq!(parse("# only a comment\n").unwrap_err(), GrammarError::Empty);
        assert!(matches!(parse("A => 'VC | 'W'").unwrap_err(), GrammarError::UnterminatedQuote { .. }));
        assert_eq!(parse("A => 'VC\n").unwrap_err(), GrammarError::UnterminatedQuote { line: 1 });
        assert!(matches!(parse("A => 'FOO'").unwrap_err(), GrammarError::UnknownTerminal { .. }));
        assert!(matches!(parse("A => A '*' A").unwrap_err(), GrammarError::NoTermination(_)));
        assert!(matches!(parse("'VC' | 'W'").unwrap_err(), GrammarError::MissingArrow { line: 1 }));
        assert!(matches!(parse("A => 'VC' | | 'W'").unwrap_err(), GrammarError::EmptyAlternative { .. }));
        assert!(matches!(parse("A => 'VC' ; 'W'").unwrap_err(), GrammarError::UnexpectedChar { ch: ';', .. }));
    }

    #[test]
    fn comments_and_repeated_lhs() {
        let g = parse("A => 'VC' # trailing\n# A => 'W'\nA => A '*' A\n").unwrap();
        assert_eq!(g.rule(0).alternatives.len(), 2);
    }
}
