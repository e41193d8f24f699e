//! Turkish-locale lowercasing.
//!
//! Turkish distinguishes dotted and dotless i in both cases, so the
//! locale-independent mapping is wrong for exactly two capitals:
//! `I` lowers to `ı` (U+0131) and `İ` (U+0130) lowers to plain `i`.
//! `I` followed by COMBINING DOT ABOVE is the decomposed form of `İ`.

const COMBINING_DOT_ABOVE: char = '\u{0307}';

pub fn turkish_lowercase(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    // Runs without I/İ go through str::to_lowercase so context-sensitive
    // mappings such as Greek final sigma still apply.
    while let Some(pos) = rest.find(['I', 'İ']) {
        out.push_str(&rest[..pos].to_lowercase());
        let mut chars = rest[pos..].chars();
        let c = chars.next().unwrap();
        let mut consumed = c.len_utf8();
        if c == 'İ' {
            out.push('i');
        } else if chars.next() == Some(COMBINING_DOT_ABOVE) {
            out.push('i');
            consumed += COMBINING_DOT_ABOVE.len_utf8();
        } else {
            out.push('ı');
        }
        rest = &rest[pos + consumed..];
    }
    out.push_str(&rest.to_lowercase());
    out
}
