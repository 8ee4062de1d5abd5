use super::{Alphabet, Generator, Letter, MixedWord, WordError};

/// Parses the surface syntax: letters, uppercase for inverses, `t`/`T` for
/// the stable letter, optional `^k` repetition, whitespace ignored.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<MixedWord, WordError> {
    let chars: Vec<char> = text.chars().collect();
    let mut raw = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let letter = letter_at(c, i, alphabet)?;
        i += 1;
        let mut count: i64 = 1;
        let mut j = i;
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        if j < chars.len() && chars[j] == '^' {
            let (k, next) = exponent_at(&chars, j + 1)?;
            count = k;
            i = next;
        }
        let letter = if count < 0 { letter.inv() } else { letter };
        for _ in 0..count.unsigned_abs() {
            raw.push(letter);
        }
    }
    Ok(MixedWord::from_letters(raw))
}

fn letter_at(c: char, position: usize, alphabet: &Alphabet) -> Result<Letter, WordError> {
    match c {
        't' => Ok(Letter::T),
        'T' => Ok(Letter::T_INV),
        c if c.is_ascii_alphabetic() => {
            let lower = c.to_ascii_lowercase();
            let g = Generator::new(lower).map_err(|_| WordError::UnknownGenerator { position, symbol: c })?;
            if !alphabet.contains(g) {
                return Err(WordError::UnknownGenerator { position, symbol: lower });
            }
            Ok(Letter::base(g, c.is_ascii_uppercase()))
        }
        _ => Err(WordError::Syntax { position, message: format!("unexpected character '{c}'") }),
    }
}

fn exponent_at(chars: &[char], start: usize) -> Result<(i64, usize), WordError> {
    let mut i = start;
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    let digits_start = i;
    if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
        i += 1;
    }
    let number_start = i;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if i == number_start {
        return Err(WordError::Syntax {
            position: digits_start,
            message: "expected an integer exponent after '^'".into(),
        });
    }
    let text: String = chars[digits_start..i].iter().collect();
    let k: i64 = text.parse().map_err(|_| WordError::Syntax {
        position: digits_start,
        message: format!("exponent '{text}' out of range"),
    })?;
    if k == 0 {
        return Err(WordError::Syntax { position: digits_start, message: "exponent must be nonzero".into() });
    }
    if k.unsigned_abs() > 1 << 20 {
        return Err(WordError::Syntax { position: digits_start, message: format!("exponent '{text}' too large") });
    }
    Ok((k, i))
}
