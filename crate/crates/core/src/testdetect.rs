//! Production vs. JUnit test file detection for Java sources.
//!
//! A file is a test file when its name starts or ends with `test` and its
//! source declares at least one public JUnit test method: either annotated
//! with `@Test` (JUnit 4) or named `test...` (JUnit 3). The source scan is
//! lexical: comments and literals are blanked, braces must balance, and
//! method declarations are recognized at class-member level.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TestDetectError {
    #[error("not a Java source file: {0}")]
    NotJavaFile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Production,
    Test,
    Unparseable,
}

impl FileKind {
    pub fn name(self) -> &'static str {
        match self {
            FileKind::Production => "production",
            FileKind::Test => "test",
            FileKind::Unparseable => "unparseable",
        }
    }
}

impl std::fmt::Display for FileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceReason {
    /// Public method annotated with `@Test`.
    TestAnnotation,
    /// Public method whose name starts with `test`.
    TestMethodName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub reason: EvidenceReason,
    /// 1-based line of the method name.
    pub line: usize,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestScanResult {
    pub kind: FileKind,
    pub evidence: Vec<Evidence>,
}

/// Whether the file name (without `.java`, lowercased) starts or ends with
/// `test`.
pub fn is_test_filename(path: &str) -> Result<bool, TestDetectError> {
    let p = Path::new(path);
    let is_java = p
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("java"));
    let stem = p.file_stem().and_then(|s| s.to_str());
    match (is_java, stem) {
        (true, Some(stem)) => {
            let base = stem.to_lowercase();
            Ok(base.starts_with("test") || base.ends_with("test"))
        }
        _ => Err(TestDetectError::NotJavaFile(path.to_owned())),
    }
}

/// Replaces comments and string, text-block and char literals with spaces,
/// keeping newlines so byte offsets and line numbers are unchanged.
/// Returns `None` for an unterminated comment or literal.
pub fn blank_comments_and_literals(source: &str) -> Option<String> {
    #[derive(PartialEq)]
    enum State {
        Code,
        LineComment,
        BlockComment,
        Str,
        TextBlock,
        Char,
    }
    let b = source.as_bytes();
    let mut out = b.to_vec();
    let mut state = State::Code;
    let mut i = 0;
    let blank = |out: &mut Vec<u8>, i: usize| {
        if out[i] != b'\n' {
            out[i] = b' ';
        }
    };
    while i < b.len() {
        let c = b[i];
        let next = b.get(i + 1).copied();
        match state {
            State::Code => match (c, next) {
                (b'/', Some(b'/')) => {
                    state = State::LineComment;
                    blank(&mut out, i);
                    blank(&mut out, i + 1);
                    i += 1;
                }
                (b'/', Some(b'*')) => {
                    state = State::BlockComment;
                    blank(&mut out, i);
                    blank(&mut out, i + 1);
                    i += 1;
                }
                (b'"', _) if b[i..].starts_with(b"\"\"\"") => {
                    state = State::TextBlock;
                    for k in i..i + 3 {
                        blank(&mut out, k);
                    }
                    i += 2;
                }
                (b'"', _) => {
                    state = State::Str;
                    blank(&mut out, i);
                }
                (b'\'', _) => {
                    state = State::Char;
                    blank(&mut out, i);
                }
                _ => {}
            },
            State::LineComment => {
                if c == b'\n' {
                    state = State::Code;
                } else {
                    blank(&mut out, i);
                }
            }
            State::BlockComment => {
                blank(&mut out, i);
                if c == b'*' && next == Some(b'/') {
                    blank(&mut out, i + 1);
                    i += 1;
                    state = State::Code;
                }
            }
            State::Str | State::Char => {
                let close = if state == State::Str { b'"' } else { b'\'' };
                if c == b'\n' {
                    return None;
                }
                blank(&mut out, i);
                if c == b'\\' && next.is_some() {
                    blank(&mut out, i + 1);
                    i += 1;
                } else if c == close {
                    state = State::Code;
                }
            }
            State::TextBlock => {
                blank(&mut out, i);
                if c == b'\\' && next.is_some() {
                    blank(&mut out, i + 1);
                    i += 1;
                } else if b[i..].starts_with(b"\"\"\"") {
                    blank(&mut out, i + 1);
                    blank(&mut out, i + 2);
                    i += 2;
                    state = State::Code;
                }
            }
        }
        i += 1;
    }
    if matches!(state, State::Code | State::LineComment) {
        // only ASCII bytes were replaced, and only whole multi-byte
        // sequences inside blanked regions, so the result is valid UTF-8
        Some(String::from_utf8_lossy(&out).into_owned())
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
}

fn tokenize(text: &str) -> Vec<(Tok, usize)> {
    let mut toks = Vec::new();
    let mut line = 1;
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c == '\n' {
            line += 1;
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let mut end = start + c.len_utf8();
            while let Some(&(i, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '$' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            toks.push((Tok::Ident(text[start..end].to_owned()), line));
        } else if c.is_ascii_digit() {
            while chars.peek().is_some_and(|&(_, d)| d.is_alphanumeric() || d == '_' || d == '.') {
                chars.next();
            }
        } else if !c.is_whitespace() {
            toks.push((Tok::Punct(c), line));
        }
    }
    toks
}

const MODIFIERS: [&str; 10] = [
    "public", "private", "protected", "static", "final", "abstract", "synchronized", "native", "strictfp", "default",
];
const TYPE_KEYWORDS: [&str; 4] = ["class", "interface", "enum", "record"];
const NOT_A_TYPE: [&str; 8] = ["new", "return", "throw", "else", "case", "extends", "implements", "throws"];

/// A method declaration found at class-member level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub line: usize,
    pub modifiers: Vec<String>,
    pub annotations: Vec<String>,
}

struct Scanner {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Scanner {
    fn peek(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn is_punct(&self, k: usize, c: char) -> bool {
        self.peek(k) == Some(&Tok::Punct(c))
    }

    /// With the cursor on an opening bracket, moves past its partner.
    fn skip_balanced(&mut self, open: char, close: char) -> Option<()> {
        let mut depth = 0usize;
        while let Some(t) = self.peek(0) {
            if *t == Tok::Punct(open) {
                depth += 1;
            } else if *t == Tok::Punct(close) {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    self.pos += 1;
                    return Some(());
                }
            }
            self.pos += 1;
        }
        None
    }
}

fn ident(t: &Tok) -> Option<&str> {
    match t {
        Tok::Ident(s) => Some(s),
        Tok::Punct(_) => None,
    }
}

/// Method declarations directly inside type bodies (nested types
/// included, bodies of methods and initializers skipped). Constructors are
/// left out. Returns `None` when the structure does not parse.
pub fn member_methods(blanked: &str) -> Option<Vec<MethodDecl>> {
    let mut s = Scanner { toks: tokenize(blanked), pos: 0 };
    let mut methods = Vec::new();
    // (type name, brace depth of its body)
    let mut types: Vec<(String, usize)> = Vec::new();
    let mut depth = 0usize;
    let mut pending_type: Option<String> = None;
    let mut header: Vec<Tok> = Vec::new();
    let mut annotations: Vec<String> = Vec::new();

    while let Some(tok) = s.peek(0).cloned() {
        let at_member_level = types.last().is_some_and(|t| t.1 == depth);
        match tok {
            Tok::Punct('@') if !matches!(s.peek(1), Some(Tok::Ident(w)) if w == "interface") => {
                s.pos += 1;
                let mut name = String::new();
                while let Some(Tok::Ident(w)) = s.peek(0) {
                    name = w.clone();
                    s.pos += 1;
                    if s.is_punct(0, '.') && matches!(s.peek(1), Some(Tok::Ident(_))) {
                        s.pos += 1;
                    } else {
                        break;
                    }
                }
                if s.is_punct(0, '(') {
                    s.skip_balanced('(', ')')?;
                }
                annotations.push(name);
            }
            Tok::Ident(ref w) if TYPE_KEYWORDS.contains(&w.as_str()) && !header.last().is_some_and(|t| *t == Tok::Punct('.')) => {
                if let Some(Tok::Ident(name)) = s.peek(1) {
                    pending_type = Some(name.clone());
                }
                header.push(tok.clone());
                s.pos += 1;
            }
            Tok::Ident(ref name) if at_member_level && s.is_punct(1, '(') => {
                let line = s.toks[s.pos].1;
                let enclosing = &types.last().expect("member level").0;
                let prev = header.last();
                let returns = match prev {
                    Some(Tok::Ident(p)) => {
                        !MODIFIERS.contains(&p.as_str()) && !TYPE_KEYWORDS.contains(&p.as_str()) && !NOT_A_TYPE.contains(&p.as_str())
                    }
                    Some(Tok::Punct('>')) | Some(Tok::Punct(']')) => true,
                    _ => false,
                };
                s.pos += 1;
                s.skip_balanced('(', ')')?;
                if returns && name != enclosing && pending_type.is_none() {
                    methods.push(MethodDecl {
                        name: name.clone(),
                        line,
                        modifiers: header
                            .iter()
                            .filter_map(ident)
                            .filter(|w| MODIFIERS.contains(w))
                            .map(str::to_owned)
                            .collect(),
                        annotations: std::mem::take(&mut annotations),
                    });
                    // skip `throws ...` up to the body or `;`
                    while let Some(t) = s.peek(0) {
                        if *t == Tok::Punct('{') || *t == Tok::Punct(';') {
                            break;
                        }
                        if *t == Tok::Punct('}') {
                            return None;
                        }
                        s.pos += 1;
                    }
                    if s.is_punct(0, '{') {
                        s.skip_balanced('{', '}')?;
                    } else if s.is_punct(0, ';') {
                        s.pos += 1;
                    }
                    header.clear();
                    annotations.clear();
                } else {
                    header.push(Tok::Ident(name.clone()));
                    header.push(Tok::Punct(')'));
                }
            }
            Tok::Punct('{') => {
                if let Some(name) = pending_type.take() {
                    depth += 1;
                    types.push((name, depth));
                    s.pos += 1;
                } else if at_member_level || types.is_empty() {
                    // initializer block, array or anonymous-class initializer
                    s.skip_balanced('{', '}')?;
                    continue;
                } else {
                    depth += 1;
                    s.pos += 1;
                }
                header.clear();
                annotations.clear();
            }
            Tok::Punct('}') => {
                depth = depth.checked_sub(1)?;
                if types.last().is_some_and(|t| t.1 == depth + 1) {
                    types.pop();
                }
                s.pos += 1;
                header.clear();
                annotations.clear();
            }
            Tok::Punct(';') => {
                s.pos += 1;
                header.clear();
                annotations.clear();
            }
            Tok::Punct('(') => {
                s.skip_balanced('(', ')')?;
                header.push(Tok::Punct(')'));
            }
            Tok::Punct(')') => return None,
            other => {
                header.push(other);
                s.pos += 1;
            }
        }
    }
    (depth == 0 && pending_type.is_none()).then_some(methods)
}

fn braces_balance(blanked: &str) -> bool {
    let mut depth: i64 = 0;
    for c in blanked.chars() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

pub fn scan_java_for_tests(source: &str) -> TestScanResult {
    let unparseable = TestScanResult {
        kind: FileKind::Unparseable,
        evidence: Vec::new(),
    };
    let Some(blanked) = blank_comments_and_literals(source) else {
        return unparseable;
    };
    if !braces_balance(&blanked) {
        return unparseable;
    }
    let Some(methods) = member_methods(&blanked) else {
        return unparseable;
    };
    let mut evidence = Vec::new();
    for m in methods.iter().filter(|m| m.modifiers.iter().any(|w| w == "public")) {
        if m.annotations.iter().any(|a| a == "Test") {
            evidence.push(Evidence {
                reason: EvidenceReason::TestAnnotation,
                line: m.line,
                method: m.name.clone(),
            });
        } else if m.name.starts_with("test") {
            evidence.push(Evidence {
                reason: EvidenceReason::TestMethodName,
                line: m.line,
                method: m.name.clone(),
            });
        }
    }
    TestScanResult {
        kind: if evidence.is_empty() { FileKind::Production } else { FileKind::Test },
        evidence,
    }
}

/// Test only when both the filename gate and the source scan agree.
/// Non-Java paths count as production.
pub fn classify_file(path: &str, source: &str) -> FileKind {
    let scan = scan_java_for_tests(source);
    match scan.kind {
        FileKind::Unparseable => FileKind::Unparseable,
        FileKind::Test if is_test_filename(path).unwrap_or(false) => FileKind::Test,
        _ => FileKind::Production,
    }
}
