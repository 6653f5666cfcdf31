//! Script-aware tokenization shared by the quality checks and the metrics.
//!
//! Han characters are single tokens; runs of Latin letters and digits are
//! split on whitespace and punctuation.

/// Whether `c` is a CJK ideograph (each one is tokenized on its own).
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2EBEF
        | 0x30000..=0x3134F)
}

pub fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TokenizeOptions {
    pub lowercase: bool,
    pub keep_punctuation: bool,
}

pub fn tokenize_with(text: &str, opts: TokenizeOptions) -> Vec<String> {
    let mut out = Vec::new();
    let mut run = String::new();
    let flush = |run: &mut String, out: &mut Vec<String>| {
        if !run.is_empty() {
            out.push(std::mem::take(run));
        }
    };
    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut run, &mut out);
        } else if is_punctuation(c) {
            flush(&mut run, &mut out);
            if opts.keep_punctuation {
                out.push(c.to_string());
            }
        } else if is_cjk(c) {
            flush(&mut run, &mut out);
            out.push(c.to_string());
        } else if opts.lowercase {
            run.extend(c.to_lowercase());
        } else {
            run.push(c);
        }
    }
    flush(&mut run, &mut out);
    out
}

/// Normalized tokens used by the rule-based checks: lowercased, punctuation dropped.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    tokenize_with(
        text,
        TokenizeOptions {
            lowercase: true,
            keep_punctuation: false,
        },
    )
}

/// Tokens used by the evaluation metrics: case preserved, punctuation kept as tokens.
pub fn metric_tokens(text: &str) -> Vec<String> {
    tokenize_with(
        text,
        TokenizeOptions {
            lowercase: false,
            keep_punctuation: true,
        },
    )
}

/// Lowercases and removes punctuation and whitespace, for substring matching on Han text.
pub fn squash(text: &str) -> String {
    text.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn is_numeric_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_numeric())
}

/// Whether a product word is mentioned in `copy`.
///
/// Words containing Han characters are matched as substrings of the squashed
/// text; space-delimited words must appear as a contiguous token run.
pub fn mentions(copy: &str, word: &str) -> bool {
    let needle = normalized_tokens(word);
    if needle.is_empty() {
        return false;
    }
    if word.chars().any(is_cjk) {
        return squash(copy).contains(&squash(word));
    }
    let hay = normalized_tokens(copy);
    hay.windows(needle.len()).any(|w| w == needle.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_script_tokenization() {
        assert_eq!(
            metric_tokens("再加99元享Air Fryer!"),
            vec!["再", "加", "99", "元", "享", "Air", "Fryer", "!"]
        );
        assert_eq!(
            normalized_tokens("城市，喧嚣。Hello, World"),
            vec!["城", "市", "喧", "嚣", "hello", "world"]
        );
    }

    #[test]
    fn mention_rules() {
        assert!(mentions("选择简约的皮艺沙发，搭配玻璃茶几", "茶几"));
        assert!(mentions("A Leather Sofa for you", "sofa"));
        assert!(!mentions("a sofabed", "sofa"));
        assert!(mentions("coffee table, glass", "coffee table"));
        assert!(!mentions("anything", ""));
    }

    #[test]
    fn numeric_tokens() {
        assert!(is_numeric_token("99"));
        assert!(!is_numeric_token("9a"));
        assert!(!is_numeric_token(""));
    }
}
