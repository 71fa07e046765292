//! Line-oriented block syntax shared by job files.
//!
//! ```text
//! # comment
//! key = value value ...
//! head words {
//!     key = value
//! }
//! ```
//!
//! A value is a bare token or a bracketed group `[ ... ]` kept verbatim.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Pair { key: Token, values: Vec<Token> },
    Block { head: Vec<Token>, body: Vec<Node> },
}

impl Node {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Node::Pair { key, .. } => (key.line, key.col),
            Node::Block { head, .. } => (head[0].line, head[0].col),
        }
    }
}

enum Line {
    Pair(Token, Vec<Token>),
    Open(Vec<Token>),
    Close(usize, usize),
}

fn tokenize(line: &str, ln: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let start = i;
        if c == '[' {
            let mut depth = 0;
            while i < chars.len() {
                match chars[i] {
                    '[' => depth += 1,
                    ']' => depth -= 1,
                    _ => {}
                }
                i += 1;
                if depth == 0 {
                    break;
                }
            }
            if depth != 0 {
                return Err(Diagnostic::new(ln, start + 1, "unclosed '['"));
            }
        } else if c == '{' || c == '}' || c == '=' {
            i += 1;
        } else {
            while i < chars.len() && !chars[i].is_whitespace() && !"{}=#[".contains(chars[i]) {
                i += 1;
            }
        }
        out.push(Token { text: chars[start..i].iter().collect(), line: ln, col: start + 1 });
    }
    Ok(out)
}

fn classify(toks: Vec<Token>, ln: usize) -> Result<Option<Line>, Diagnostic> {
    if toks.is_empty() {
        return Ok(None);
    }
    let is = |t: &Token, s: &str| t.text == s;
    if toks.len() == 1 && is(&toks[0], "}") {
        return Ok(Some(Line::Close(ln, toks[0].col)));
    }
    if let Some(bad) = toks.iter().find(|t| is(t, "}")) {
        return Err(Diagnostic::new(ln, bad.col, "'}' must stand on its own line"));
    }
    if is(toks.last().unwrap(), "{") {
        let head = toks[..toks.len() - 1].to_vec();
        if head.is_empty() {
            return Err(Diagnostic::new(ln, toks[0].col, "block needs a name before '{'"));
        }
        if let Some(bad) = head.iter().find(|t| is(t, "{") || is(t, "=")) {
            return Err(Diagnostic::new(ln, bad.col, format!("unexpected '{}' in block header", bad.text)));
        }
        return Ok(Some(Line::Open(head)));
    }
    if let Some(bad) = toks.iter().find(|t| is(t, "{")) {
        return Err(Diagnostic::new(ln, bad.col, "'{' must end the line"));
    }
    if toks.len() >= 2 && is(&toks[1], "=") {
        let key = toks[0].clone();
        if is(&key, "=") {
            return Err(Diagnostic::new(ln, key.col, "missing key before '='"));
        }
        let values = toks[2..].to_vec();
        if let Some(bad) = values.iter().find(|t| is(t, "=")) {
            return Err(Diagnostic::new(ln, bad.col, "second '=' on one line"));
        }
        if values.is_empty() {
            return Err(Diagnostic::new(ln, toks[1].col + 1, format!("missing value for '{}'", key.text)));
        }
        return Ok(Some(Line::Pair(key, values)));
    }
    if is(&toks[0], "=") {
        return Err(Diagnostic::new(ln, toks[0].col, "missing key before '='"));
    }
    // `key value ...` without '=' is a repeated entry such as `rank1 1 0`
    if let Some(bad) = toks.iter().find(|t| is(t, "=")) {
        return Err(Diagnostic::new(ln, bad.col, "'=' must follow the key"));
    }
    Ok(Some(Line::Pair(toks[0].clone(), toks[1..].to_vec())))
}

/// Parses text into a forest of nodes.
pub fn parse_tree(text: &str) -> Result<Vec<Node>, Vec<Diagnostic>> {
    let mut stack: Vec<(Vec<Token>, Vec<Node>)> = vec![(Vec::new(), Vec::new())];
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = match tokenize(raw, ln).and_then(|t| classify(t, ln)) {
            Ok(Some(l)) => l,
            Ok(None) => continue,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        match line {
            Line::Pair(key, values) => stack.last_mut().unwrap().1.push(Node::Pair { key, values }),
            Line::Open(head) => stack.push((head, Vec::new())),
            Line::Close(l, c) => {
                if stack.len() == 1 {
                    diags.push(Diagnostic::new(l, c, "unmatched '}'"));
                    continue;
                }
                let (head, body) = stack.pop().unwrap();
                stack.last_mut().unwrap().1.push(Node::Block { head, body });
            }
        }
    }
    while stack.len() > 1 {
        let (head, _) = stack.pop().unwrap();
        diags.push(Diagnostic::new(head[0].line, head[0].col, format!("block '{}' is never closed", head[0].text)));
    }
    if diags.is_empty() {
        Ok(stack.pop().unwrap().1)
    } else {
        Err(diags)
    }
}

/// Plain (unlocated) node used for writing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Out {
    Pair(String, Vec<String>),
    Block(Vec<String>, Vec<Out>),
}

pub fn write_tree(nodes: &[Out]) -> String {
    fn go(n: &Out, depth: usize, s: &mut String) {
        let pad = "    ".repeat(depth);
        match n {
            Out::Pair(k, v) => {
                s.push_str(&format!("{pad}{k} = {}\n", v.join(" ")));
            }
            Out::Block(h, body) => {
                s.push_str(&format!("{pad}{} {{\n", h.join(" ")));
                for b in body {
                    go(b, depth + 1, s);
                }
                s.push_str(&format!("{pad}}}\n"));
            }
        }
    }
    let mut s = String::new();
    for n in nodes {
        go(n, 0, &mut s);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_blocks_and_groups() {
        let t = "p = 3\nmodule a {\n  rank1 5/9 -2  # comment\n  a = [(0, 1), (1, 2)]\n}\n";
        let n = parse_tree(t).unwrap();
        assert_eq!(n.len(), 2);
        let Node::Block { head, body } = &n[1] else { panic!() };
        assert_eq!(head[1].text, "a");
        let Node::Pair { values, .. } = &body[1] else { panic!() };
        assert_eq!(values[0].text, "[(0, 1), (1, 2)]");
    }

    #[test]
    fn located_errors() {
        let e = parse_tree("a {\n  b = 1\n").unwrap_err();
        assert_eq!((e[0].line, e[0].col), (1, 1));
        let e = parse_tree("x = [1, 2\n").unwrap_err();
        assert_eq!((e[0].line, e[0].col), (1, 5));
        let e = parse_tree("}\n").unwrap_err();
        assert_eq!(e[0].line, 1);
        let e = parse_tree("p =\n").unwrap_err();
        assert_eq!((e[0].line, e[0].col), (1, 4));
    }
}
