//! Strict TSV ingestion for corpora and annotations.
//!
//! Corpus lines: `doc<TAB>chapter<TAB>verse<TAB>token token ...`.
//! Annotation lines: `doc:chapter:verse<TAB>{0|1}`.
//! Fully empty lines are skipped; anything else malformed is an error
//! carrying its 1-based line number. Document blocks must be contiguous and
//! (chapter, verse) strictly increasing within a document, which also rules
//! out duplicates.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{AnnotationMap, VerseRecord};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_corpus(path: &Path) -> Result<Vec<VerseRecord>> {
    parse_corpus_reader(BufReader::new(File::open(path)?))
}

pub fn parse_corpus_reader<R: BufRead>(reader: R) -> Result<Vec<VerseRecord>> {
    let mut records = Vec::new();
    let mut seen_docs: BTreeSet<String> = BTreeSet::new();
    let mut current_doc: Option<String> = None;
    let mut last_pos = (0u32, 0u32);

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected 4 tab-separated fields, got {}", fields.len()),
            ));
        }
        let doc = fields[0];
        if doc.is_empty() {
            return Err(parse_err(line_no, "empty document id"));
        }
        if doc.contains(':') {
            return Err(parse_err(
                line_no,
                "document ids must not contain ':' (reserved for verse ids)",
            ));
        }
        let chapter: u32 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad chapter index '{}'", fields[1])))?;
        let verse: u32 = fields[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad verse index '{}'", fields[2])))?;
        let tokens: Vec<String> = fields[3].split_whitespace().map(str::to_string).collect();
        if tokens.is_empty() {
            return Err(parse_err(line_no, "empty token list"));
        }

        let switching = current_doc.as_deref() != Some(doc);
        if switching {
            if seen_docs.contains(doc) {
                return Err(parse_err(
                    line_no,
                    format!("document '{doc}' reappears after other documents; blocks must be contiguous"),
                ));
            }
            seen_docs.insert(doc.to_string());
            current_doc = Some(doc.to_string());
            last_pos = (0, 0);
        }
        let pos = (chapter, verse);
        if pos <= last_pos {
            return Err(parse_err(
                line_no,
                format!(
                    "verse {doc}:{chapter}:{verse} is not after {}:{}:{} (duplicates and reordering are rejected)",
                    doc, last_pos.0, last_pos.1
                ),
            ));
        }
        last_pos = pos;

        records.push(VerseRecord {
            doc: doc.to_string(),
            chapter,
            verse,
            tokens,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("corpus file has no verses"));
    }
    Ok(records)
}

pub fn parse_annotations(path: &Path) -> Result<AnnotationMap> {
    parse_annotations_reader(BufReader::new(File::open(path)?))
}

pub fn parse_annotations_reader<R: BufRead>(reader: R) -> Result<AnnotationMap> {
    let mut ann = AnnotationMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_err(
                line_no,
                format!("expected 2 tab-separated fields, got {}", fields.len()),
            ));
        }
        let id = fields[0];
        if id.split(':').count() != 3 {
            return Err(parse_err(
                line_no,
                format!("bad verse id '{id}', expected doc:chapter:verse"),
            ));
        }
        let label = match fields[1] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(parse_err(
                    line_no,
                    format!("bad label '{other}', expected 0 or 1"),
                ))
            }
        };
        if !ann.insert(id.to_string(), label) {
            return Err(parse_err(line_no, format!("duplicate annotation for '{id}'")));
        }
    }
    Ok(ann)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<VerseRecord>> {
        parse_corpus_reader(s.as_bytes())
    }

    #[test]
    fn two_verse_fixture_parses_in_order() {
        let recs = parse("gen\t1\t1\tin the beginning\ngen\t1\t2\tand the earth\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].tokens, vec!["in", "the", "beginning"]);
        assert_eq!(recs[1].id(), "gen:1:2");
    }

    #[test]
    fn rejects_malformed_lines_with_line_numbers() {
        let err = parse("gen\t1\t1\ta b\ngen\t1\t2\t\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("empty token list"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("gen\t1\t1\n").is_err()); // 3 fields
        assert!(parse("gen\tone\t1\ta\n").is_err()); // bad chapter
        assert!(parse("ge:n\t1\t1\ta\n").is_err()); // ':' in doc id
        assert!(parse("").is_err()); // no verses
    }

    #[test]
    fn rejects_duplicates_and_reordering() {
        assert!(parse("gen\t1\t1\ta\ngen\t1\t1\tb\n").is_err());
        assert!(parse("gen\t1\t2\ta\ngen\t1\t1\tb\n").is_err());
        assert!(parse("gen\t2\t1\ta\ngen\t1\t9\tb\n").is_err());
        // chapters advance, verse index may restart
        assert!(parse("gen\t1\t9\ta\ngen\t2\t1\tb\n").is_ok());
        // a document block may not reappear
        assert!(parse("gen\t1\t1\ta\nexo\t1\t1\tb\ngen\t1\t2\tc\n").is_err());
    }

    #[test]
    fn skips_blank_lines_and_carriage_returns() {
        let recs = parse("gen\t1\t1\ta b\r\n\ngen\t1\t2\tc\r\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].tokens, vec!["a", "b"]);
    }

    #[test]
    fn hundred_verse_round_trip() {
        let mut src = String::new();
        for i in 0..100 {
            src.push_str(&format!("doc\t{}\t{}\ttok{} tok{}\n", 1 + i / 25, 1 + i % 25, i, i + 1));
        }
        let recs = parse(&src).unwrap();
        assert_eq!(recs.len(), 100);
        let json = serde_json::to_string(&recs).unwrap();
        let back: Vec<VerseRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(recs, back);
    }

    #[test]
    fn annotations_parse_and_validate() {
        let ann = parse_annotations_reader("gen:1:1\t1\ngen:1:2\t0\n".as_bytes()).unwrap();
        assert_eq!(ann.len(), 2);
        assert_eq!(ann.get("gen:1:1"), Some(1));
        assert_eq!(ann.get("gen:1:2"), Some(0));

        assert!(parse_annotations_reader("gen:1:1\t2\n".as_bytes()).is_err());
        assert!(parse_annotations_reader("gen:1\t1\n".as_bytes()).is_err());
        assert!(
            parse_annotations_reader("gen:1:1\t1\ngen:1:1\t0\n".as_bytes()).is_err(),
            "duplicates must error"
        );
    }
}
