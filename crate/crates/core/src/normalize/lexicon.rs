//! Emoji → Turkish translation lexicon.
//!
//! File layout is a UTF-8 CSV with the header
//! `Unicode.Code.Point.s.,Emoji,Description,Translated`, code points written
//! as `U+XXXX` and joined by spaces for multi-codepoint sequences.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use aho_corasick::{AhoCorasick, MatchKind};

use super::chars;
use crate::error::{Error, Result};

pub const LEXICON_HEADER: [&str; 4] = ["Unicode.Code.Point.s.", "Emoji", "Description", "Translated"];

const BUNDLED: &str = include_str!("../../data/emoji_tr.csv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiLexiconEntry {
    pub code_points: Vec<char>,
    pub glyph: String,
    pub description_en: String,
    pub translation_tr: String,
}

impl EmojiLexiconEntry {
    pub fn new(code_points: Vec<char>, description_en: &str, translation_tr: &str) -> Result<Self> {
        let glyph: String = code_points.iter().collect();
        Self::with_glyph(code_points, glyph, description_en, translation_tr)
    }

    fn with_glyph(code_points: Vec<char>, glyph: String, description_en: &str, translation_tr: &str) -> Result<Self> {
        if code_points.is_empty() {
            return Err(Error::Validation("emoji entry without code points".into()));
        }
        if !glyph.chars().eq(code_points.iter().copied()) {
            return Err(Error::Validation(format!(
                "glyph {glyph:?} does not match code points {}",
                format_code_points(&code_points)
            )));
        }
        let translation_tr = translation_tr.trim();
        if translation_tr.is_empty() {
            return Err(Error::Validation(format!("empty translation for {glyph:?}")));
        }
        Ok(EmojiLexiconEntry {
            code_points,
            glyph,
            description_en: description_en.trim().to_string(),
            translation_tr: translation_tr.to_string(),
        })
    }
}

pub fn parse_code_points(s: &str) -> Result<Vec<char>> {
    s.split_whitespace()
        .map(|tok| {
            let hex = tok
                .strip_prefix("U+")
                .or_else(|| tok.strip_prefix("u+"))
                .ok_or_else(|| Error::Validation(format!("code point {tok:?} lacks the U+ prefix")))?;
            u32::from_str_radix(hex, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| Error::Validation(format!("invalid code point {tok:?}")))
        })
        .collect()
}

pub fn format_code_points(cps: &[char]) -> String {
    cps.iter()
        .map(|&c| format!("U+{:04X}", c as u32))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Result of translating one text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub text: String,
    /// Emoji not found in the lexicon, deleted from the text.
    pub unknown_removed: usize,
}

/// An immutable lexicon with a longest-match automaton over its glyphs.
#[derive(Debug, Clone)]
pub struct EmojiLexicon {
    entries: Vec<EmojiLexiconEntry>,
    matcher: AhoCorasick,
    // pattern index -> entry index
    targets: Vec<usize>,
}

impl EmojiLexicon {
    pub fn new(entries: Vec<EmojiLexiconEntry>) -> Result<Self> {
        let mut patterns: Vec<String> = Vec::new();
        let mut targets = Vec::new();
        for (i, entry) in entries.iter().enumerate() {
            if patterns.contains(&entry.glyph) {
                return Err(Error::Validation(format!(
                    "duplicate lexicon entry for {}",
                    format_code_points(&entry.code_points)
                )));
            }
            patterns.push(entry.glyph.clone());
            targets.push(i);
        }
        // Texts often drop or add VS16; index the bare form as well unless
        // it is itself an entry.
        for (i, entry) in entries.iter().enumerate() {
            let bare: String = entry.glyph.chars().filter(|&c| c != '\u{FE0F}').collect();
            if !bare.is_empty() && bare != entry.glyph && !patterns.contains(&bare) {
                patterns.push(bare);
                targets.push(i);
            }
        }
        let matcher = AhoCorasick::builder()
            .match_kind(MatchKind::LeftmostLongest)
            .build(&patterns)
            .map_err(|e| Error::Validation(format!("cannot build emoji matcher: {e}")))?;
        Ok(EmojiLexicon {
            entries,
            matcher,
            targets,
        })
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_csv_reader(BUNDLED.as_bytes(), Path::new("emoji_tr.csv"))
            .expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, path)
    }

    pub fn from_csv_reader<R: Read>(reader: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::format(origin, e.to_string()))?;
        let header: Vec<&str> = headers.iter().map(str::trim).collect();
        if header != LEXICON_HEADER {
            return Err(Error::format(
                origin,
                format!("expected header {:?}, found {header:?}", LEXICON_HEADER.join(",")),
            ));
        }
        let mut entries = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::format(origin, e.to_string()))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let at_line = |e: Error| Error::format(origin, format!("line {line}: {e}"));
            if record.len() != 4 {
                return Err(at_line(Error::Validation(format!("expected 4 fields, found {}", record.len()))));
            }
            let code_points = parse_code_points(&record[0]).map_err(at_line)?;
            let glyph = if record[1].is_empty() {
                code_points.iter().collect()
            } else {
                record[1].to_string()
            };
            let entry = EmojiLexiconEntry::with_glyph(code_points, glyph, &record[2], &record[3]).map_err(at_line)?;
            entries.push(entry);
        }
        Self::new(entries).map_err(|e| Error::format(origin, e.to_string()))
    }

    pub fn entries(&self) -> &[EmojiLexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, glyph: &str) -> Option<&EmojiLexiconEntry> {
        self.entries.iter().find(|e| e.glyph == glyph)
    }

    /// Replaces every lexicon glyph with `(translation)`, longest sequence
    /// first, and deletes any remaining emoji characters.
    pub fn translate(&self, text: &str) -> Translation {
        let mut out = String::with_capacity(text.len());
        let mut unknown_removed = 0;
        let mut copy_gap = |gap: &str, out: &mut String| {
            for c in gap.chars() {
                if chars::is_emoji_char(c) {
                    if chars::is_pictograph(c) {
                        unknown_removed += 1;
                    }
                } else {
                    out.push(c);
                }
            }
        };
        let mut last = 0;
        for m in self.matcher.find_iter(text) {
            copy_gap(&text[last..m.start()], &mut out);
            let entry = &self.entries[self.targets[m.pattern().as_usize()]];
            out.push('(');
            out.push_str(&entry.translation_tr);
            out.push(')');
            last = m.end();
        }
        copy_gap(&text[last..], &mut out);
        Translation { text: out, unknown_removed }
    }
}

/// Translates with `lexicon`, discarding the deletion count.
pub fn translate_emoji(text: &str, lexicon: &EmojiLexicon) -> String {
    lexicon.translate(text).text
}
