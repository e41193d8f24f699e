//! Character classes used by emoji deletion and character cleanup.

/// Pictographic code points treated as emoji.
const PICTOGRAPH_RANGES: &[(u32, u32)] = &[
    (0x231A, 0x231B),
    (0x2328, 0x2328),
    (0x23CF, 0x23CF),
    (0x23E9, 0x23F3),
    (0x23F8, 0x23FA),
    (0x24C2, 0x24C2),
    (0x25AA, 0x25AB),
    (0x25B6, 0x25B6),
    (0x25C0, 0x25C0),
    (0x25FB, 0x25FE),
    (0x2600, 0x27BF),
    (0x2934, 0x2935),
    (0x2B05, 0x2B07),
    (0x2B1B, 0x2B1C),
    (0x2B50, 0x2B50),
    (0x2B55, 0x2B55),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
    (0x1F000, 0x1FAFF),
    (0x1FC00, 0x1FFFD),
];

/// Format characters (general category Cf).
const FORMAT_RANGES: &[(u32, u32)] = &[
    (0x00AD, 0x00AD),
    (0x0600, 0x0605),
    (0x061C, 0x061C),
    (0x06DD, 0x06DD),
    (0x070F, 0x070F),
    (0x0890, 0x0891),
    (0x08E2, 0x08E2),
    (0x180E, 0x180E),
    (0x200B, 0x200F),
    (0x202A, 0x202E),
    (0x2060, 0x2064),
    (0x2066, 0x206F),
    (0xFEFF, 0xFEFF),
    (0xFFF9, 0xFFFB),
    (0x110BD, 0x110BD),
    (0x110CD, 0x110CD),
    (0x13430, 0x1343F),
    (0x1BCA0, 0x1BCA3),
    (0x1D173, 0x1D17A),
    (0xE0001, 0xE0001),
    (0xE0020, 0xE007F),
];

fn in_ranges(c: char, ranges: &[(u32, u32)]) -> bool {
    let c = c as u32;
    ranges
        .binary_search_by(|&(lo, hi)| {
            if hi < c {
                std::cmp::Ordering::Less
            } else if lo > c {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

pub fn is_skin_tone_modifier(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

pub fn is_variation_selector(c: char) -> bool {
    ('\u{FE00}'..='\u{FE0F}').contains(&c) || ('\u{E0100}'..='\u{E01EF}').contains(&c)
}

/// Emoji base characters, excluding skin-tone modifiers.
pub fn is_pictograph(c: char) -> bool {
    in_ranges(c, PICTOGRAPH_RANGES) && !is_skin_tone_modifier(c)
}

/// Characters that only occur as parts of emoji sequences.
pub fn is_emoji_component(c: char) -> bool {
    c == '\u{200D}'
        || c == '\u{20E3}'
        || is_variation_selector(c)
        || is_skin_tone_modifier(c)
        || ('\u{E0020}'..='\u{E007F}').contains(&c)
}

pub fn is_emoji_char(c: char) -> bool {
    is_pictograph(c) || is_emoji_component(c)
}

pub fn is_format(c: char) -> bool {
    in_ranges(c, FORMAT_RANGES)
}

/// Control, format, variation-selector and keycap characters. Whitespace
/// controls (tab, newline) are kept for the whitespace-collapse step.
pub fn is_unwanted(c: char) -> bool {
    (c.is_control() && !c.is_whitespace())
        || is_format(c)
        || is_variation_selector(c)
        || c == '\u{20E3}'
}
