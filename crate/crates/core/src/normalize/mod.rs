//! Rule-based tweet normalization.
//!
//! Steps, in order: invisible-character strip, retweet markers, URLs,
//! mentions, hashtags, emoji translation, character cleanup, Turkish
//! lowercasing, whitespace collapse.
//! The retweet rule has to run before the mention rule, otherwise `@user`
//! inside `RT @user:` is consumed first. Punctuation is kept and duplicate
//! posts are never dropped.

mod casing;
pub mod chars;
mod lexicon;

use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

pub use casing::turkish_lowercase;
pub use lexicon::{
    format_code_points, parse_code_points, translate_emoji, EmojiLexicon, EmojiLexiconEntry, Translation,
    LEXICON_HEADER,
};

use crate::ingest::RawPost;
use crate::time::Timestamp;

pub const RETWEET_TOKEN: &str = "(retweetlemek)";
pub const URL_TOKEN: &str = "(bağlantı adresi)";
pub const MENTION_TOKEN: &str = "(kullanıcı)";

static RETWEET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"RT @\w+:").unwrap());
static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\w+://\S+").unwrap());
// Twitter handle alphabet; zero-or-more, so a bare `@` is replaced too.
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@[A-Za-z0-9_]*").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#(\w+)").unwrap());

pub fn replace_retweets(text: &str) -> String {
    RETWEET.replace_all(text, RETWEET_TOKEN).into_owned()
}

pub fn replace_urls(text: &str) -> String {
    URL.replace_all(text, URL_TOKEN).into_owned()
}

pub fn replace_mentions(text: &str) -> String {
    MENTION.replace_all(text, MENTION_TOKEN).into_owned()
}

/// `#word` becomes `(word)`; `\w` is Unicode-aware.
pub fn unwrap_hashtags(text: &str) -> String {
    HASHTAG.replace_all(text, "(${1})").into_owned()
}

/// Drops control and format characters that cannot belong to an emoji
/// sequence, so a zero-width space cannot split a URL or hashtag.
pub fn strip_invisible(text: &str) -> String {
    text.chars()
        .filter(|&c| !chars::is_unwanted(c) || chars::is_emoji_component(c))
        .collect()
}

/// Drops control, format and variation-selector characters, and any `#`
/// left behind by the hashtag rule (e.g. a truncated `#…`).
pub fn remove_unwanted(text: &str) -> String {
    text.chars().filter(|&c| c != '#' && !chars::is_unwanted(c)).collect()
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Text after the full rule chain, with the number of unknown emoji deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    pub text: String,
    pub unknown_emoji_removed: usize,
}

pub fn normalize_text(text: &str, lexicon: &EmojiLexicon) -> NormalizedText {
    let text = strip_invisible(text);
    let text = replace_retweets(&text);
    let text = replace_urls(&text);
    let text = replace_mentions(&text);
    let text = unwrap_hashtags(&text);
    let Translation { text, unknown_removed } = lexicon.translate(&text);
    let text = remove_unwanted(&text);
    let text = turkish_lowercase(&text);
    NormalizedText {
        text: collapse_whitespace(&text),
        unknown_emoji_removed: unknown_removed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedPost {
    pub id: String,
    pub created_at: Timestamp,
    pub text: String,
}

pub fn normalize_post(post: &RawPost, lexicon: &EmojiLexicon) -> NormalizedPost {
    NormalizedPost {
        id: post.id.clone(),
        created_at: post.created_at,
        text: normalize_text(&post.text, lexicon).text,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeStats {
    pub posts: usize,
    pub unknown_emoji_removed: usize,
}

/// Normalizes posts in parallel; output order equals input order.
pub fn normalize_posts(posts: &[RawPost], lexicon: &EmojiLexicon) -> (Vec<NormalizedPost>, NormalizeStats) {
    let results: Vec<(NormalizedPost, usize)> = posts
        .par_iter()
        .map(|p| {
            let n = normalize_text(&p.text, lexicon);
            (
                NormalizedPost {
                    id: p.id.clone(),
                    created_at: p.created_at,
                    text: n.text,
                },
                n.unknown_emoji_removed,
            )
        })
        .collect();
    let stats = NormalizeStats {
        posts: results.len(),
        unknown_emoji_removed: results.iter().map(|(_, n)| n).sum(),
    };
    (results.into_iter().map(|(p, _)| p).collect(), stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retweets() {
        assert_eq!(replace_retweets("RT @Zalim_Fira: Sessiz istila"), "(retweetlemek) Sessiz istila");
        assert_eq!(replace_retweets("sessiz istila"), "sessiz istila");
        assert_eq!(replace_retweets("RT @a: RT @b: x"), "(retweetlemek) (retweetlemek) x");
        assert_eq!(replace_retweets("RT @Şule: x"), "(retweetlemek) x");
    }

    #[test]
    fn urls() {
        assert_eq!(replace_urls("x https://t.co/tB5KS6U94u"), "x (bağlantı adresi)");
        assert_eq!(replace_urls("no links here"), "no links here");
        assert_eq!(
            replace_urls("https://t.co/tB5KS6U94u https://t.co/2mg9KzOQhu"),
            "(bağlantı adresi) (bağlantı adresi)"
        );
    }

    #[test]
    fn mentions() {
        assert_eq!(replace_mentions("@KaracasuHande Çok yazık."), "(kullanıcı) Çok yazık.");
        assert_eq!(replace_mentions("e-posta yok"), "e-posta yok");
        assert_eq!(replace_mentions("a@b"), "a(kullanıcı)");
        // comma is not part of a handle
        assert_eq!(replace_mentions("@ali,veli"), "(kullanıcı),veli");
    }

    #[test]
    fn hashtags() {
        assert_eq!(unwrap_hashtags("#sessizistila #suriyeliler"), "(sessizistila) (suriyeliler)");
        assert_eq!(unwrap_hashtags("# boş"), "# boş");
        assert_eq!(unwrap_hashtags("#sığınmacısorunu"), "(sığınmacısorunu)");
        assert_eq!(unwrap_hashtags("#göç_yasası"), "(göç_yasası)");
    }

    #[test]
    fn grinning_face_after_lowercasing() {
        let lex = EmojiLexicon::bundled();
        assert_eq!(translate_emoji("\u{1F600}", &lex), "(Sırıtan Yüz)");
        assert_eq!(normalize_text("\u{1F600}", &lex).text, "(sırıtan yüz)");
    }

    #[test]
    fn cleanup_and_whitespace() {
        assert_eq!(remove_unwanted("a\u{200B}b\u{FE0F}c#…"), "abc…");
        assert_eq!(collapse_whitespace("  a \t\n b  "), "a b");
    }

    #[test]
    fn zero_width_space_cannot_hide_a_url_or_hashtag() {
        let lex = EmojiLexicon::bundled();
        assert_eq!(normalize_text("bak https:\u{200B}//t.co/x", &lex).text, "bak (bağlantı adresi)");
        assert_eq!(normalize_text("#sessiz\u{200B}istila", &lex).text, "(sessizistila)");
        assert_eq!(strip_invisible("a\u{200D}b\u{FE0F}\u{200E}"), "a\u{200D}b\u{FE0F}");
    }

    #[test]
    fn plain_lowercase_sentence_is_a_fixpoint() {
        let lex = EmojiLexicon::bundled();
        let s = "bugün hava çok güzel, değil mi? evet!";
        assert_eq!(normalize_text(s, &lex).text, s);
    }

    #[test]
    fn parallel_matches_sequential_order() {
        let lex = EmojiLexicon::bundled();
        let posts: Vec<RawPost> = (0..200)
            .map(|i| RawPost {
                id: i.to_string(),
                created_at: "2022-05-01T00:00:00Z".parse().unwrap(),
                text: format!("RT @u{i}: Metin {i} 😀 #etiket{}", i % 7),
                lang: "tr".into(),
            })
            .collect();
        let (par, stats) = normalize_posts(&posts, &lex);
        let seq: Vec<_> = posts.iter().map(|p| normalize_post(p, &lex)).collect();
        assert_eq!(par, seq);
        assert_eq!(stats.posts, 200);
        assert_eq!(stats.unknown_emoji_removed, 0);
    }
}
