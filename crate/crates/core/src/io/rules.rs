use super::{content, IoError};
use crate::membership::MembershipRule;
use crate::model::{Domain, Value, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Open,
    Close,
    Comma,
    Arrow,
    NotEq,
}

fn lex(line: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < line.len() {
        let rest = &line[i..];
        let ch = rest.chars().next().expect("non-empty");
        let (tok, len) = match ch {
            c if c.is_whitespace() => {
                i += c.len_utf8();
                continue;
            }
            '{' => (Tok::Open, 1),
            '}' => (Tok::Close, 1),
            ',' => (Tok::Comma, 1),
            _ if rest.starts_with("->") => (Tok::Arrow, 2),
            _ if rest.starts_with("!=") => (Tok::NotEq, 2),
            _ => {
                let mut j = i;
                while j < line.len() {
                    let r = &line[j..];
                    let c = r.chars().next().expect("non-empty");
                    if c.is_whitespace() || "{},".contains(c) || r.starts_with("->") || r.starts_with("!=") {
                        break;
                    }
                    j += c.len_utf8();
                }
                (Tok::Word(&line[i..j]), j - i)
            }
        };
        out.push((i + 1, tok));
        i += len;
    }
    out
}

struct Parser<'a, 'n> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    line: usize,
    end: usize,
    names: &'n [String],
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, IoError> {
        Err(IoError::syntax(self.line, self.col(), message))
    }

    fn expect(&mut self, want: Tok<'_>, what: &str) -> Result<(), IoError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn word(&mut self, what: &str) -> Result<&'a str, IoError> {
        match self.peek() {
            Some(&Tok::Word(w)) => {
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn var(&mut self) -> Result<VarId, IoError> {
        let col = self.col();
        let name = self.word("a variable name")?;
        match self.names.iter().position(|n| n == name) {
            Some(i) => Ok(VarId(i)),
            None => Err(IoError::syntax(self.line, col, format!("unknown variable `{name}`"))),
        }
    }

    fn range(&mut self) -> Result<Domain, IoError> {
        self.expect(Tok::Open, "`{`")?;
        let mut d = Domain::empty();
        if self.peek() == Some(&Tok::Close) {
            return self.fail("empty range");
        }
        loop {
            d.insert(Value::parse(self.word("a value")?));
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(d);
                }
                _ => return self.fail("expected `,` or `}`"),
            }
        }
    }

    fn rule(&mut self) -> Result<MembershipRule, IoError> {
        let start = self.col();
        let mut premise = Vec::new();
        if self.peek() != Some(&Tok::Arrow) {
            loop {
                let v = self.var()?;
                if self.word("`in`")? != "in" {
                    self.pos -= 1;
                    return self.fail("expected `in`");
                }
                premise.push((v, self.range()?));
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Arrow, "`->`")?;
        let mut conclusion = Vec::new();
        loop {
            let v = self.var()?;
            self.expect(Tok::NotEq, "`!=`")?;
            conclusion.push((v, Value::parse(self.word("a value")?)));
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                None => break,
                _ => return self.fail("expected `,` or end of line"),
            }
        }
        MembershipRule::new(premise, conclusion).map_err(|e| IoError::syntax(self.line, start, e.to_string()))
    }
}

/// One rule per line, `y in {a,b}, w in {c} -> z != a, x != b`, variables
/// by name. An empty premise is written `-> z != a`.
pub fn parse_rules(text: &str, names: &[String]) -> Result<Vec<MembershipRule>, IoError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let body = content(raw);
        let toks = lex(body);
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser {
            toks,
            pos: 0,
            line: k + 1,
            end: body.trim_end().len() + 1,
            names,
        };
        out.push(p.rule()?);
    }
    Ok(out)
}

fn name(names: &[String], v: VarId) -> &str {
    names.get(v.0).map_or("?", String::as_str)
}

fn line(r: &MembershipRule, names: &[String]) -> String {
    let premise: Vec<String> = r.premise().iter().map(|(v, s)| format!("{} in {s}", name(names, *v))).collect();
    let conclusion: Vec<String> = r.conclusion().iter().map(|(v, a)| format!("{} != {a}", name(names, *v))).collect();
    if premise.is_empty() {
        format!("-> {}", conclusion.join(", "))
    } else {
        format!("{} -> {}", premise.join(", "), conclusion.join(", "))
    }
}

/// Canonical text: rules sorted, one per line.
pub fn write_rules(rules: &[MembershipRule], names: &[String]) -> String {
    let mut sorted: Vec<&MembershipRule> = rules.iter().collect();
    sorted.sort();
    sorted.iter().map(|r| line(r, names) + "\n").collect()
}

/// Display-only propagation-rule notation, e.g.
/// `and3(x,y,z), y in [f,u] ==> z ne t`.
pub fn render_chr(r: &MembershipRule, names: &[String], constraint: &str) -> String {
    let mut head = vec![format!("{constraint}({})", names.join(","))];
    for (v, s) in r.premise() {
        let vals: Vec<String> = s.iter().map(Value::to_string).collect();
        head.push(format!("{} in [{}]", name(names, *v), vals.join(",")));
    }
    let body: Vec<String> = r.conclusion().iter().map(|(v, a)| format!("{} ne {a}", name(names, *v))).collect();
    format!("{} ==> {}", head.join(", "), body.join(", "))
}
