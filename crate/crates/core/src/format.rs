//! Language and sentence files: a line-oriented text format and its JSON mirror.
//!
//! Language file:
//!
//! ```text
//! domain 2
//! relation XOR0 3
//! 0 0 0
//! 0 1 1
//! 1 0 1
//! 1 1 0
//! end
//! ```
//!
//! An optional `elements <name_0> .. <name_{n-1}>` line right after `domain`
//! declares aliases usable in tuple rows. A nullary tuple is written `()`.
//!
//! Sentence file:
//!
//! ```text
//! forall x
//! exists y
//! constraint NOT x y
//! ```
//!
//! `#` starts a comment. User variables may not contain `$`; that character is
//! reserved for names introduced by transformations.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Position};
use crate::model::{
    Atom, ConstraintLanguage, CspInstance, DomainSpec, Element, QuantifiedSentence, QuantifiedVar, Quantifier,
    Relation, ValueTuple,
};

/// On-disk encoding, chosen from the file extension by callers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Text,
        }
    }
}

/// A whitespace-separated token with its 1-based column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (byte, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(token_at(content, s, byte));
            }
        } else if start.is_none() {
            start = Some(byte);
        }
    }
    if let Some(s) = start {
        tokens.push(token_at(content, s, content.len()));
    }
    tokens
}

fn token_at(line: &str, start: usize, end: usize) -> Token<'_> {
    Token {
        text: &line[start..end],
        column: line[..start].chars().count() + 1,
    }
}

fn pos(line: usize, column: usize) -> Position {
    Position { line, column }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos: pos(line, column),
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.' | '$'))
        && !s.starts_with(|c: char| c.is_ascii_digit() || c == '-')
}

fn check_relation_name(name: &str, line: usize, column: usize) -> Result<(), ParseError> {
    if !is_identifier(name) || name.contains('$') {
        return Err(syntax(line, column, format!("invalid relation name `{name}`")));
    }
    Ok(())
}

fn check_variable_name(name: &str, allow_reserved: bool, line: usize, column: usize) -> Result<(), ParseError> {
    if !is_identifier(name) {
        return Err(syntax(line, column, format!("invalid variable name `{name}`")));
    }
    if name.contains('$') && !allow_reserved {
        return Err(ParseError::ReservedName {
            pos: pos(line, column),
            name: name.to_string(),
        });
    }
    Ok(())
}

struct OpenRelation {
    name: String,
    arity: usize,
    tuples: Vec<ValueTuple>,
    line: usize,
    column: usize,
}

/// Parses the text language format.
pub fn parse_language(text: &str) -> Result<ConstraintLanguage, ParseError> {
    let mut domain: Option<DomainSpec> = None;
    let mut aliases: HashMap<String, Element> = HashMap::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut names: HashSet<String> = HashSet::new();
    let mut open: Option<OpenRelation> = None;

    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let tokens = tokenize(raw);
        let Some(head) = tokens.first() else { continue };

        if let Some(rel) = open.as_mut() {
            if head.text == "end" {
                if tokens.len() > 1 {
                    return Err(syntax(line, tokens[1].column, "unexpected token after `end`"));
                }
                let rel = open.take().expect("open relation");
                let d = domain.expect("domain precedes relations");
                let relation = Relation::new(rel.name.clone(), rel.arity, d, rel.tuples)
                    .map_err(|e| syntax(rel.line, rel.column, e.to_string()))?;
                relations.push(relation);
                continue;
            }
            let d = domain.expect("domain precedes relations");
            let nullary = tokens.len() == 1 && head.text == "()";
            let found = if nullary { 0 } else { tokens.len() };
            if found != rel.arity {
                return Err(ParseError::ArityMismatch {
                    pos: pos(line, head.column),
                    relation: rel.name.clone(),
                    arity: rel.arity,
                    found,
                });
            }
            let mut tuple = Vec::with_capacity(found);
            if !nullary {
                for tok in &tokens {
                    tuple.push(parse_element(tok, line, d, &aliases)?);
                }
            }
            rel.tuples.push(tuple);
            continue;
        }

        match head.text {
            "domain" => {
                if domain.is_some() {
                    return Err(syntax(line, head.column, "domain declared twice"));
                }
                let [_, size] = tokens.as_slice() else {
                    return Err(syntax(line, head.column, "expected `domain <size>`"));
                };
                let n: u32 = size
                    .text
                    .parse()
                    .map_err(|_| syntax(line, size.column, format!("invalid domain size `{}`", size.text)))?;
                if n == 0 {
                    return Err(syntax(line, size.column, "domain size must be at least 1"));
                }
                domain = Some(DomainSpec::new(n).expect("positive size"));
            }
            "elements" => {
                let Some(d) = domain else {
                    return Err(syntax(line, head.column, "`elements` must follow `domain`"));
                };
                if !relations.is_empty() || !aliases.is_empty() {
                    return Err(syntax(line, head.column, "`elements` must directly follow `domain`"));
                }
                let names_given = &tokens[1..];
                if names_given.len() != d.size() as usize {
                    return Err(syntax(
                        line,
                        head.column,
                        format!("expected {} element names, found {}", d.size(), names_given.len()),
                    ));
                }
                for (value, tok) in names_given.iter().enumerate() {
                    if !is_identifier(tok.text) || tok.text.contains('$') {
                        return Err(syntax(line, tok.column, format!("invalid element name `{}`", tok.text)));
                    }
                    if aliases.insert(tok.text.to_string(), value as Element).is_some() {
                        return Err(syntax(line, tok.column, format!("element name `{}` repeated", tok.text)));
                    }
                }
            }
            "relation" => {
                if domain.is_none() {
                    return Err(syntax(line, head.column, "`relation` before `domain`"));
                }
                let [_, name, arity] = tokens.as_slice() else {
                    return Err(syntax(line, head.column, "expected `relation <name> <arity>`"));
                };
                check_relation_name(name.text, line, name.column)?;
                let arity: usize = arity
                    .text
                    .parse()
                    .map_err(|_| syntax(line, arity.column, format!("invalid arity `{}`", arity.text)))?;
                if !names.insert(name.text.to_string()) {
                    return Err(ParseError::DuplicateRelation {
                        pos: pos(line, name.column),
                        name: name.text.to_string(),
                    });
                }
                open = Some(OpenRelation {
                    name: name.text.to_string(),
                    arity,
                    tuples: Vec::new(),
                    line,
                    column: name.column,
                });
            }
            other => {
                return Err(syntax(line, head.column, format!("unexpected `{other}`")));
            }
        }
    }

    if let Some(rel) = open {
        return Err(syntax(
            last_line.max(1),
            1,
            format!("relation `{}` is missing its `end`", rel.name),
        ));
    }
    let Some(d) = domain else {
        return Err(syntax(last_line.max(1), 1, "missing `domain <size>`"));
    };
    let mut lang = ConstraintLanguage::new(d);
    for r in relations {
        lang.add(r).expect("names checked while parsing");
    }
    Ok(lang)
}

fn parse_element(
    tok: &Token<'_>,
    line: usize,
    domain: DomainSpec,
    aliases: &HashMap<String, Element>,
) -> Result<Element, ParseError> {
    if let Some(&v) = aliases.get(tok.text) {
        return Ok(v);
    }
    let value: u64 = tok
        .text
        .parse()
        .map_err(|_| syntax(line, tok.column, format!("invalid element `{}`", tok.text)))?;
    if value >= domain.size() as u64 {
        return Err(ParseError::OutOfRange {
            pos: pos(line, tok.column),
            value,
            size: domain.size(),
        });
    }
    Ok(value as Element)
}

/// Options for sentence parsing.
#[derive(Clone, Copy, Debug, Default)]
pub struct SentenceOptions {
    /// Accept `$`-names, as produced by transformations.
    pub allow_reserved: bool,
}

/// Parses the text sentence format against `language`, rejecting reserved names.
pub fn parse_sentence(text: &str, language: Arc<ConstraintLanguage>) -> Result<QuantifiedSentence, ParseError> {
    parse_sentence_with(text, language, SentenceOptions::default())
}

pub fn parse_sentence_with(
    text: &str,
    language: Arc<ConstraintLanguage>,
    options: SentenceOptions,
) -> Result<QuantifiedSentence, ParseError> {
    let mut prefix = Vec::new();
    let mut quantified: HashSet<String> = HashSet::new();
    let mut matrix = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw);
        let Some(head) = tokens.first() else { continue };
        match head.text {
            "forall" | "exists" => {
                if !matrix.is_empty() {
                    return Err(syntax(line, head.column, "quantifier after the first constraint"));
                }
                let [_, var] = tokens.as_slice() else {
                    return Err(syntax(line, head.column, format!("expected `{} <var>`", head.text)));
                };
                check_variable_name(var.text, options.allow_reserved, line, var.column)?;
                if !quantified.insert(var.text.to_string()) {
                    return Err(ParseError::RepeatedQuantifier {
                        pos: pos(line, var.column),
                        name: var.text.to_string(),
                    });
                }
                prefix.push(QuantifiedVar {
                    quantifier: if head.text == "forall" {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    },
                    var: var.text.to_string(),
                });
            }
            "constraint" => {
                let Some(rel_tok) = tokens.get(1) else {
                    return Err(syntax(line, head.column, "expected `constraint <relation> <vars..>`"));
                };
                let Some(rel) = language.get(rel_tok.text) else {
                    return Err(ParseError::UnknownRelation {
                        pos: pos(line, rel_tok.column),
                        name: rel_tok.text.to_string(),
                    });
                };
                let args = &tokens[2..];
                if args.len() != rel.arity() {
                    return Err(ParseError::ArityMismatch {
                        pos: pos(line, rel_tok.column),
                        relation: rel.name().to_string(),
                        arity: rel.arity(),
                        found: args.len(),
                    });
                }
                for a in args {
                    check_variable_name(a.text, options.allow_reserved, line, a.column)?;
                    if !quantified.contains(a.text) {
                        return Err(ParseError::Unquantified {
                            pos: pos(line, a.column),
                            name: a.text.to_string(),
                        });
                    }
                }
                matrix.push(Atom::new(rel_tok.text, args.iter().map(|a| a.text)));
            }
            other => return Err(syntax(line, head.column, format!("unexpected `{other}`"))),
        }
    }
    Ok(QuantifiedSentence::new_unchecked(language, prefix, matrix))
}

/// Serializes a language in the text format; rows are emitted in lexicographic order.
pub fn serialize_language(lang: &ConstraintLanguage) -> String {
    let mut out = format!("domain {}\n", lang.domain().size());
    for rel in lang.relations() {
        out.push_str(&format!("relation {} {}\n", rel.name(), rel.arity()));
        for t in rel.tuples() {
            if t.is_empty() {
                out.push_str("()\n");
            } else {
                let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out.push_str("end\n");
    }
    out
}

pub fn serialize_sentence(sentence: &QuantifiedSentence) -> String {
    let mut out = String::new();
    for q in sentence.prefix() {
        out.push_str(&format!("{} {}\n", q.quantifier, q.var));
    }
    for atom in sentence.matrix() {
        out.push_str("constraint ");
        out.push_str(&atom.relation);
        for a in &atom.args {
            out.push(' ');
            out.push_str(a);
        }
        out.push('\n');
    }
    out
}

/// An instance is written as a sentence whose prefix is all `exists`.
pub fn serialize_instance(instance: &CspInstance) -> String {
    serialize_sentence(&instance.to_sentence())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageDoc {
    domain: u32,
    #[serde(default)]
    relations: Vec<RelationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    name: String,
    arity: usize,
    #[serde(default)]
    tuples: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SentenceDoc {
    #[serde(default)]
    prefix: Vec<QuantifiedVar>,
    #[serde(default)]
    constraints: Vec<Atom>,
}

fn json_err(path: impl std::fmt::Display, message: impl std::fmt::Display) -> ParseError {
    ParseError::Json(format!("{path}: {message}"))
}

pub fn parse_language_json(text: &str) -> Result<ConstraintLanguage, ParseError> {
    let doc: LanguageDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if doc.domain == 0 {
        return Err(json_err("domain", "domain size must be at least 1"));
    }
    let d = DomainSpec::new(doc.domain).expect("positive size");
    let mut lang = ConstraintLanguage::new(d);
    for (i, rel) in doc.relations.into_iter().enumerate() {
        if !is_identifier(&rel.name) || rel.name.contains('$') {
            return Err(json_err(format!("relations[{i}].name"), format!("invalid relation name `{}`", rel.name)));
        }
        if lang.get(&rel.name).is_some() {
            return Err(json_err(format!("relations[{i}]"), format!("duplicate relation `{}`", rel.name)));
        }
        let mut tuples = Vec::with_capacity(rel.tuples.len());
        for (j, t) in rel.tuples.into_iter().enumerate() {
            if t.len() != rel.arity {
                return Err(json_err(
                    format!("relations[{i}].tuples[{j}]"),
                    format!("tuple of length {} in relation of arity {}", t.len(), rel.arity),
                ));
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= d.size() as u64) {
                return Err(json_err(
                    format!("relations[{i}].tuples[{j}]"),
                    format!("element {bad} out of range for domain of size {}", d.size()),
                ));
            }
            tuples.push(t.into_iter().map(|v| v as Element).collect());
        }
        let relation = Relation::new(rel.name, rel.arity, d, tuples).map_err(|e| json_err(format!("relations[{i}]"), e))?;
        lang.add(relation).map_err(|e| json_err(format!("relations[{i}]"), e))?;
    }
    Ok(lang)
}

pub fn parse_sentence_json(
    text: &str,
    language: Arc<ConstraintLanguage>,
    options: SentenceOptions,
) -> Result<QuantifiedSentence, ParseError> {
    let doc: SentenceDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut seen = HashSet::new();
    for (i, q) in doc.prefix.iter().enumerate() {
        if !is_identifier(&q.var) || (q.var.contains('$') && !options.allow_reserved) {
            return Err(json_err(format!("prefix[{i}]"), format!("invalid or reserved variable `{}`", q.var)));
        }
        if !seen.insert(q.var.as_str()) {
            return Err(json_err(format!("prefix[{i}]"), format!("variable `{}` is quantified more than once", q.var)));
        }
    }
    for (i, atom) in doc.constraints.iter().enumerate() {
        let Some(rel) = language.get(&atom.relation) else {
            return Err(json_err(format!("constraints[{i}]"), format!("unknown relation `{}`", atom.relation)));
        };
        if rel.arity() != atom.args.len() {
            return Err(json_err(
                format!("constraints[{i}]"),
                format!("`{}` has arity {} but is applied to {} arguments", rel.name(), rel.arity(), atom.args.len()),
            ));
        }
        if let Some(v) = atom.args.iter().find(|v| !seen.contains(v.as_str())) {
            return Err(json_err(format!("constraints[{i}]"), format!("variable `{v}` is not quantified")));
        }
    }
    Ok(QuantifiedSentence::new_unchecked(language, doc.prefix, doc.constraints))
}

pub fn language_to_json(lang: &ConstraintLanguage) -> String {
    let doc = LanguageDoc {
        domain: lang.domain().size(),
        relations: lang
            .relations()
            .map(|r| RelationDoc {
                name: r.name().to_string(),
                arity: r.arity(),
                tuples: r
                    .tuples()
                    .iter()
                    .map(|t| t.iter().map(|&v| v as u64).collect())
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("language serializes")
}

pub fn sentence_to_json(sentence: &QuantifiedSentence) -> String {
    let doc = SentenceDoc {
        prefix: sentence.prefix().to_vec(),
        constraints: sentence.matrix().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("sentence serializes")
}

pub fn read_language(text: &str, format: Format) -> Result<ConstraintLanguage, ParseError> {
    match format {
        Format::Text => parse_language(text),
        Format::Json => parse_language_json(text),
    }
}

pub fn read_sentence(
    text: &str,
    language: Arc<ConstraintLanguage>,
    format: Format,
    options: SentenceOptions,
) -> Result<QuantifiedSentence, ParseError> {
    match format {
        Format::Text => parse_sentence_with(text, language, options),
        Format::Json => parse_sentence_json(text, language, options),
    }
}

pub fn read_instance(
    text: &str,
    language: Arc<ConstraintLanguage>,
    format: Format,
) -> Result<CspInstance, Error> {
    let sentence = read_sentence(text, language, format, SentenceOptions { allow_reserved: true })?;
    CspInstance::from_sentence(sentence)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR0: &str = "domain 2\nrelation XOR0 3\n0 0 0\n0 1 1\n1 0 1\n1 1 0\nend\n";
    const NOT: &str = "domain 2\nrelation NOT 2\n0 1\n1 0\nend\n";

    fn not_lang() -> Arc<ConstraintLanguage> {
        Arc::new(parse_language(NOT).unwrap())
    }

    #[test]
    fn parses_affine_relation() {
        let lang = parse_language(XOR0).unwrap();
        let r = lang.get("XOR0").unwrap();
        assert_eq!(r.arity(), 3);
        assert_eq!(r.len(), 4);
        assert!(r.contains(&[1, 1, 0]));
    }

    #[test]
    fn parses_disequality() {
        let lang = not_lang();
        let r = lang.get("NOT").unwrap();
        assert_eq!(r.arity(), 2);
        assert_eq!(r.tuples().iter().cloned().collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn tuple_length_mismatch_reports_position() {
        let err = parse_language("domain 2\nrelation R 2\n0 1 2\nend\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::ArityMismatch {
                pos: Position { line: 3, column: 1 },
                relation: "R".into(),
                arity: 2,
                found: 3
            }
        );
    }

    #[test]
    fn language_errors() {
        assert!(matches!(
            parse_language("domain 2\nrelation R 1\n5\nend\n").unwrap_err(),
            ParseError::OutOfRange { value: 5, pos: Position { line: 3, column: 1 }, .. }
        ));
        assert!(matches!(
            parse_language("domain 2\nrelation R 1\nend\nrelation R 1\nend\n").unwrap_err(),
            ParseError::DuplicateRelation { pos: Position { line: 4, column: 10 }, .. }
        ));
        assert!(matches!(
            parse_language("domain 2\nrelation R 1\n0\n").unwrap_err(),
            ParseError::Syntax { .. }
        ));
        assert!(matches!(parse_language("relation R 1\nend\n").unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse_language("domain x\n").unwrap_err(), ParseError::Syntax { pos: Position { line: 1, column: 8 }, .. }));
        assert!(matches!(parse_language("").unwrap_err(), ParseError::Syntax { .. }));
    }

    #[test]
    fn element_aliases_and_comments() {
        let lang = parse_language("# affine\ndomain 2\nelements lo hi\nrelation NOT 2 # disequality\nlo hi\nhi lo\nend\n").unwrap();
        assert_eq!(lang, *not_lang());
    }

    #[test]
    fn nullary_relation_round_trips() {
        let lang = parse_language("domain 1\nrelation T 0\n()\nend\nrelation F 0\nend\n").unwrap();
        assert_eq!(lang.get("T").unwrap().len(), 1);
        assert!(lang.get("F").unwrap().is_empty());
        assert_eq!(parse_language(&serialize_language(&lang)).unwrap(), lang);
    }

    #[test]
    fn parses_sentence() {
        let s = parse_sentence("forall x\nexists y\nconstraint NOT x y\n", not_lang()).unwrap();
        assert_eq!(s.prefix(), &[QuantifiedVar::forall("x"), QuantifiedVar::exists("y")]);
        assert_eq!(s.matrix(), &[Atom::new("NOT", ["x", "y"])]);
    }

    #[test]
    fn sentence_errors() {
        assert!(matches!(
            parse_sentence("exists y\nconstraint NOT x y\n", not_lang()).unwrap_err(),
            ParseError::Unquantified { pos: Position { line: 2, column: 16 }, .. }
        ));
        assert!(matches!(
            parse_sentence("forall x\nexists y\nconstraint NOPE x y\n", not_lang()).unwrap_err(),
            ParseError::UnknownRelation { .. }
        ));
        assert!(matches!(
            parse_sentence("forall x\nexists x\n", not_lang()).unwrap_err(),
            ParseError::RepeatedQuantifier { .. }
        ));
        assert!(matches!(
            parse_sentence("forall z$0\n", not_lang()).unwrap_err(),
            ParseError::ReservedName { .. }
        ));
        assert!(matches!(
            parse_sentence("forall x\nconstraint NOT x\n", not_lang()).unwrap_err(),
            ParseError::ArityMismatch { .. }
        ));
        assert!(parse_sentence_with("forall z$0\n", not_lang(), SentenceOptions { allow_reserved: true }).is_ok());
    }

    #[test]
    fn json_mirror_matches_text() {
        let lang = parse_language(XOR0).unwrap();
        assert_eq!(parse_language_json(&language_to_json(&lang)).unwrap(), lang);
        let lang = Arc::new(lang);
        let s = parse_sentence("forall a\nforall b\nexists c\nconstraint XOR0 a b c\n", lang.clone()).unwrap();
        let back = parse_sentence_json(&sentence_to_json(&s), lang, SentenceOptions::default()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_errors() {
        assert!(parse_language_json("{\"domain\": 2, \"relations\": [{\"name\": \"R\", \"arity\": 2, \"tuples\": [[0,1,1]]}]}").is_err());
        assert!(parse_language_json("{\"domain\": 2, \"relations\": [{\"name\": \"R\", \"arity\": 1, \"tuples\": [[3]]}]}").is_err());
        assert!(parse_language_json("{\"domain\": 2").is_err());
        let err = parse_sentence_json(
            "{\"prefix\": [{\"quantifier\": \"exists\", \"var\": \"y\"}], \"constraints\": [{\"relation\": \"NOT\", \"args\": [\"x\", \"y\"]}]}",
            not_lang(),
            SentenceOptions::default(),
        );
        assert!(err.is_err());
    }
}
