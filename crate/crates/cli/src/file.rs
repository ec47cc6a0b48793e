//! Raw `[section]` / `key = value` reader with line tracking.

use std::collections::BTreeMap;

use crate::LoadError;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub line: usize,
    pub entries: BTreeMap<String, Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawFile {
    pub sections: BTreeMap<String, Section>,
}

impl RawFile {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }
}

/// Splits a file into sections. `#` starts a comment; repeated sections
/// and keys are errors.
pub fn read(text: &str) -> Result<RawFile, LoadError> {
    let mut out = RawFile::default();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if !raw.is_ascii() {
            return Err(LoadError::Parse { line, message: "non-ASCII character".into() });
        }
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| LoadError::Parse { line, message: "unterminated section header".into() })?
                .trim()
                .to_string();
            if out.sections.contains_key(&name) {
                return Err(LoadError::Parse { line, message: format!("section [{name}] repeated") });
            }
            out.sections.insert(name.clone(), Section { line, entries: BTreeMap::new() });
            current = Some(name);
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| LoadError::Parse { line, message: "expected `key = value`".into() })?;
        let sec = current
            .as_ref()
            .ok_or_else(|| LoadError::Parse { line, message: "entry before any section".into() })?;
        let key = k.trim().to_string();
        let section = out.sections.get_mut(sec).expect("section exists");
        if section.entries.contains_key(&key) {
            return Err(LoadError::Parse { line, message: format!("key `{key}` repeated") });
        }
        section.entries.insert(key, Entry { value: v.trim().to_string(), line });
    }
    Ok(out)
}

/// Splits on `sep` outside parentheses.
pub fn split_top(text: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            parts.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() || !parts.is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

/// `(a, b, c)` into its components.
pub fn tuple(text: &str) -> Option<Vec<String>> {
    let t = text.trim();
    let inner = t.strip_prefix('(')?.strip_suffix(')')?;
    // reject `(a)(b)`: the outer parentheses must match each other
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    Some(split_top(inner, ','))
}

/// `name(a, b)` into `(name, [a, b])`.
pub fn call(text: &str) -> Option<(String, Vec<String>)> {
    let t = text.trim();
    let open = t.find('(')?;
    let name = t[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((name.to_string(), tuple(&t[open..])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_lines() {
        let f = read("# c\n[a]\nx = 1 # tail\n\n[b]\ny = (1, 2)\n").unwrap();
        assert_eq!(f.section("a").unwrap().get("x").unwrap(), &Entry { value: "1".into(), line: 3 });
        assert_eq!(f.section("b").unwrap().get("y").unwrap().line, 6);
        assert!(matches!(read("x = 1"), Err(LoadError::Parse { line: 1, .. })));
        assert!(matches!(read("[a]\nx = 1\nx = 2"), Err(LoadError::Parse { line: 3, .. })));
    }

    #[test]
    fn splitting() {
        assert_eq!(split_top("(1, sin(x1)); (x2, 3)", ';'), vec!["(1, sin(x1))", "(x2, 3)"]);
        assert_eq!(tuple("(a, (b + c), d)").unwrap(), vec!["a", "(b + c)", "d"]);
        assert!(tuple("(a)(b)").is_none());
        assert_eq!(call("diag(-1, 1)").unwrap(), ("diag".to_string(), vec!["-1".to_string(), "1".to_string()]));
    }
}
