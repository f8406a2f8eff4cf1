//! Attribute-token vocabulary.
//!
//! A vocabulary is an ordered list of attribute names (`id`, `style`, ...)
//! whose positions are the attribute indices used throughout the crate, plus
//! the name of the functional extraction token. The shipped default lives in
//! `data/vocab.json`; any other list can be loaded from a file with the same
//! shape.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::VocabError;

/// Index of an attribute within its vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AttributeId(pub u16);

impl AttributeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

const DEFAULT_VOCAB_JSON: &str = include_str!("../data/vocab.json");

/// On-disk shape of a vocabulary document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabFile {
    pub tokens: Vec<String>,
    /// Names added on top of the ten core attributes. Informational only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extension: Vec<String>,
    pub functional_extraction_token: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeVocabulary {
    names: Vec<String>,
    extension: Vec<String>,
    functional_extraction_token: String,
}

impl AttributeVocabulary {
    pub fn new<I, S>(names: I, functional_extraction_token: impl Into<String>) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let functional_extraction_token = functional_extraction_token.into();
        if names.is_empty() {
            return Err(VocabError::Empty);
        }
        if names.len() > u16::MAX as usize {
            return Err(VocabError::TooLarge(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            check_identifier(name)?;
            if names[..i].contains(name) {
                return Err(VocabError::Duplicate(name.clone()));
            }
        }
        check_identifier(&functional_extraction_token)?;
        if names.contains(&functional_extraction_token) {
            return Err(VocabError::Duplicate(functional_extraction_token));
        }
        Ok(Self {
            names,
            extension: Vec::new(),
            functional_extraction_token,
        })
    }

    pub fn from_file_repr(file: VocabFile) -> Result<Self, VocabError> {
        let mut vocab = Self::new(file.tokens, file.functional_extraction_token)?;
        for name in &file.extension {
            if !vocab.names.contains(name) {
                return Err(VocabError::UnknownExtension(name.clone()));
            }
        }
        vocab.extension = file.extension;
        Ok(vocab)
    }

    pub fn from_json(text: &str) -> Result<Self, VocabError> {
        let file: VocabFile = serde_json::from_str(text).map_err(|e| VocabError::Parse(e.to_string()))?;
        Self::from_file_repr(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| VocabError::Io(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_file_repr(&self) -> VocabFile {
        VocabFile {
            tokens: self.names.clone(),
            extension: self.extension.clone(),
            functional_extraction_token: self.functional_extraction_token.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<AttributeId> {
        self.names.iter().position(|n| n == name).map(|i| AttributeId(i as u16))
    }

    pub fn name(&self, id: AttributeId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// `(name, index)` pairs in index order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, AttributeId)> + '_ {
        self.names.iter().enumerate().map(|(i, n)| (n.as_str(), AttributeId(i as u16)))
    }

    pub fn is_extension(&self, name: &str) -> bool {
        self.extension.iter().any(|n| n == name)
    }

    pub fn functional_extraction_token(&self) -> &str {
        &self.functional_extraction_token
    }
}

impl Default for AttributeVocabulary {
    /// The shipped 14-entry vocabulary.
    fn default() -> Self {
        Self::from_json(DEFAULT_VOCAB_JSON).expect("bundled vocabulary is valid")
    }
}

fn check_identifier(name: &str) -> Result<(), VocabError> {
    let mut chars = name.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {
            chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(VocabError::InvalidName(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_fourteen_contiguous_entries() {
        let vocab = AttributeVocabulary::default();
        assert_eq!(vocab.len(), 14);
        for (i, (_, id)) in vocab.entries().enumerate() {
            assert_eq!(id.index(), i);
        }
        for name in ["id", "subject", "clothing", "style", "layout", "pose", "lighting", "background", "texture", "emotion"] {
            assert!(vocab.contains(name), "{name}");
            assert!(!vocab.is_extension(name));
        }
        assert!(vocab.is_extension("scene"));
        assert!(!vocab.contains("aura"));
        assert_eq!(vocab.functional_extraction_token(), "extract");
    }

    #[test]
    fn rejects_bad_names() {
        assert!(matches!(AttributeVocabulary::new(["Style"], "extract"), Err(VocabError::InvalidName(_))));
        assert!(matches!(AttributeVocabulary::new([""], "extract"), Err(VocabError::InvalidName(_))));
        assert!(matches!(AttributeVocabulary::new(["a", "a"], "extract"), Err(VocabError::Duplicate(_))));
        assert!(matches!(AttributeVocabulary::new(Vec::<String>::new(), "extract"), Err(VocabError::Empty)));
        assert!(matches!(AttributeVocabulary::new(["extract"], "extract"), Err(VocabError::Duplicate(_))));
    }

    #[test]
    fn file_repr_round_trips() {
        let vocab = AttributeVocabulary::default();
        let text = serde_json::to_string(&vocab.to_file_repr()).unwrap();
        assert_eq!(AttributeVocabulary::from_json(&text).unwrap(), vocab);
    }
}
