use std::path::Path;

use super::{ComplexError, SphereComplex};
use crate::word_algebra::Alphabet;

/// Labels may use any generator symbol.
pub(crate) fn label_alphabet() -> Alphabet {
    Alphabet::of_rank(25).expect("25 symbols are available")
}

pub fn parse_complex(text: &str) -> Result<SphereComplex, ComplexError> {
    let complex: SphereComplex = serde_json::from_str(text)?;
    complex.index()?;
    Ok(complex)
}

pub fn load_complex(path: impl AsRef<Path>) -> Result<SphereComplex, ComplexError> {
    parse_complex(&std::fs::read_to_string(path)?)
}

pub fn to_json(complex: &SphereComplex) -> String {
    let mut text = serde_json::to_string_pretty(complex).expect("complexes serialize");
    text.push('\n');
    text
}

pub fn save_complex(complex: &SphereComplex, path: impl AsRef<Path>) -> Result<(), ComplexError> {
    std::fs::write(path, to_json(complex))?;
    Ok(())
}

pub(crate) mod label_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::word_algebra::BaseWord;

    pub fn serialize<S: Serializer>(label: &Option<BaseWord>, s: S) -> Result<S::Ok, S::Error> {
        label.as_ref().map(|w| w.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BaseWord>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| BaseWord::parse(&t, &super::label_alphabet()).map_err(serde::de::Error::custom)).transpose()
    }
}
