use std::fs;
use std::path::{Path, PathBuf};

use qaut_core::comodule::PairingData;
use qaut_core::multimatrix::{MultiMatrix, MultiMatrixJson};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{file}: cannot read: {source}")]
    Io { file: PathBuf, source: std::io::Error },
    #[error("{file}:{line}:{column}: {message} (near `{token}`)")]
    Parse { file: PathBuf, line: usize, column: usize, token: String, message: String },
    #[error("{file}: {message}")]
    Invalid { file: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    token: Option<&'a str>,
    message: String,
}

impl InputError {
    pub fn to_json(&self) -> serde_json::Value {
        let file = |f: &Path| Some(f.display().to_string());
        let body = match self {
            InputError::Io { file: f, source } => ErrorJson {
                error: "io",
                file: file(f),
                line: None,
                column: None,
                token: None,
                message: source.to_string(),
            },
            InputError::Parse { file: f, line, column, token, message } => ErrorJson {
                error: "parse",
                file: file(f),
                line: Some(*line),
                column: Some(*column),
                token: Some(token),
                message: message.clone(),
            },
            InputError::Invalid { file: f, message } => ErrorJson {
                error: "invalid",
                file: file(f),
                line: None,
                column: None,
                token: None,
                message: message.clone(),
            },
            InputError::Usage(m) => {
                ErrorJson { error: "usage", file: None, line: None, column: None, token: None, message: m.clone() }
            }
        };
        serde_json::to_value(body).expect("error json")
    }
}

/// The offending token: a backquoted fragment of the message, else the text
/// just before the reported column.
fn token_at(text: &str, line: usize, column: usize, message: &str) -> String {
    if let Some((_, rest)) = message.split_once('`') {
        if let Some((tok, _)) = rest.split_once('`') {
            return tok.to_string();
        }
    }
    let Some(src) = text.lines().nth(line.saturating_sub(1)) else { return String::new() };
    let end = src.char_indices().nth(column).map_or(src.len(), |(i, _)| i);
    let head = src[..end].trim_end_matches([',', ']', '}', ' ']);
    let start = head.rfind(['[', ',', ':', '{', ' ']).map_or(0, |i| i + 1);
    let tok = head[start..].trim();
    if tok.is_empty() {
        src.trim().chars().take(24).collect()
    } else {
        tok.to_string()
    }
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io { file: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| {
        let message = e.to_string();
        let message = message.split(" at line ").next().unwrap_or(&message).to_string();
        InputError::Parse {
            file: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            token: token_at(&text, e.line(), e.column(), &message),
            message,
        }
    })
}

pub fn load_multimatrix(path: &Path) -> Result<MultiMatrix, InputError> {
    let raw: MultiMatrixJson = load_json(path)?;
    MultiMatrix::try_from(raw).map_err(|e| InputError::Invalid { file: path.to_path_buf(), message: e.to_string() })
}

pub fn load_pairing(path: &Path) -> Result<PairingData, InputError> {
    let data: PairingData = load_json(path)?;
    data.validate().map_err(|e| InputError::Invalid { file: path.to_path_buf(), message: e.to_string() })?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_from_message() {
        assert_eq!(token_at("", 1, 1, "cannot parse scalar from `1/0x`"), "1/0x");
    }

    #[test]
    fn token_from_column() {
        let text = "{\n  \"blocks\": [[[1, 2,, 3]]]\n}";
        assert_eq!(token_at(text, 2, 20, "expected value"), "2");
    }
}
