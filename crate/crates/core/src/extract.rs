//! Code and report extraction: splits fenced code out of agent reports into
//! named files, and merges the prose of all reports into one final report.

use crate::pipeline::PipelineArtifacts;
use crate::report::{closes_fence, line_fence};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;
use thiserror::Error;

pub const CANONICAL_FILES: [&str; 3] = ["env.py", "train.py", "eval.py"];
pub const RLSPEC_TAG: &str = "rlspec";
pub const RLSPEC_FILE: &str = "rlspec.txt";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeArtifact {
    pub filename: String,
    pub language_tag: String,
    pub source: String,
}

impl CodeArtifact {
    pub fn is_rlspec(&self) -> bool {
        self.language_tag.eq_ignore_ascii_case(RLSPEC_TAG)
    }
}

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// A fenced block located in a Markdown document.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FencedBlock {
    pub info: String,
    pub body: String,
    /// Line index of the opening fence.
    pub open_line: usize,
    /// Line index of the closing fence (or the last line when unclosed).
    pub close_line: usize,
    /// Lines between the previous block's close and this block's opening.
    pub preceding: Vec<String>,
}

pub(crate) fn fenced_blocks(markdown: &str) -> Vec<FencedBlock> {
    let lines: Vec<&str> = markdown.lines().collect();
    let mut blocks = Vec::new();
    let mut last_close: Option<usize> = None;
    let mut i = 0;
    while i < lines.len() {
        let trimmed = lines[i].trim_start();
        let Some(marker) = line_fence(lines[i]) else {
            i += 1;
            continue;
        };
        let info = trimmed[marker.len()..].trim().to_string();
        let open = i;
        let mut body = Vec::new();
        let mut close = None;
        let mut j = i + 1;
        while j < lines.len() {
            if closes_fence(lines[j], &marker) {
                close = Some(j);
                break;
            }
            body.push(lines[j]);
            j += 1;
        }
        let close_line = close.unwrap_or(lines.len().saturating_sub(1));
        let start = last_close.map(|c| c + 1).unwrap_or(0);
        blocks.push(FencedBlock {
            info,
            body: if body.is_empty() {
                String::new()
            } else {
                let mut b = body.join("\n");
                b.push('\n');
                b
            },
            open_line: open,
            close_line,
            preceding: lines[start..open].iter().map(|s| s.to_string()).collect(),
        });
        last_close = Some(close_line);
        i = close_line + 1;
    }
    blocks
}

static NAME_ATTR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?:^|\s)(?:name|file|filename)=["']?([^\s"']+)"#).unwrap());

static FILE_TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([A-Za-z0-9_\-]+\.[A-Za-z0-9]{1,5})\b").unwrap());

fn language_token(info: &str) -> Option<String> {
    info.split_whitespace()
        .next()
        .filter(|t| !t.contains('='))
        .map(|t| t.trim_matches(|c| c == '{' || c == '}' || c == '.').to_ascii_lowercase())
        .filter(|t| !t.is_empty())
}

fn is_heading_or_bold(line: &str) -> bool {
    let t = line.trim();
    t.starts_with('#') || t.contains("**") || t.contains("__")
}

fn filename_from_context(preceding: &[String]) -> Option<Option<String>> {
    let line = preceding.iter().rev().find(|l| is_heading_or_bold(l))?;
    Some(
        FILE_TOKEN
            .captures_iter(line)
            .map(|c| c[1].to_string())
            .find(|name| !name.chars().next().unwrap().is_ascii_digit()),
    )
}

fn extension_for(lang: &str) -> &'static str {
    match lang {
        "python" | "py" => "py",
        "rust" | "rs" => "rs",
        "bash" | "sh" | "shell" => "sh",
        "json" => "json",
        "yaml" | "yml" => "yaml",
        _ => "txt",
    }
}

/// Splits every fenced code block of `markdown` into a named artifact.
///
/// Filenames resolve by: the fence's `name=` attribute, then a `*.ext` token
/// in the nearest preceding heading or bold line, then position (first
/// unnamed block is `env.py`, second `train.py`, third `eval.py`). Blocks
/// tagged `rlspec` are named `rlspec.txt` and take no position.
pub fn extract_code(markdown: &str) -> Vec<CodeArtifact> {
    let mut out = Vec::new();
    let mut position = 0usize;
    for block in fenced_blocks(markdown) {
        let lang = language_token(&block.info);
        let language_tag = lang.clone().unwrap_or_else(|| "unknown".to_string());
        if language_tag == RLSPEC_TAG {
            out.push(CodeArtifact { filename: RLSPEC_FILE.to_string(), language_tag, source: block.body });
            continue;
        }
        let named = NAME_ATTR
            .captures(&block.info)
            .map(|c| c[1].to_string())
            .or_else(|| filename_from_context(&block.preceding).flatten());
        let filename = named.unwrap_or_else(|| match CANONICAL_FILES.get(position) {
            Some(name) => name.to_string(),
            None => format!("block_{}.{}", position + 1, extension_for(lang.as_deref().unwrap_or(""))),
        });
        position += 1;
        out.push(CodeArtifact { filename, language_tag, source: block.body });
    }
    out
}

/// Writes each artifact to `out_dir`, LF-normalized, de-duplicating names as
/// `name-2.ext`, `name-3.ext`, ...
pub fn write_code_files(artifacts: &[CodeArtifact], out_dir: &Path) -> Result<Vec<PathBuf>, WriteError> {
    std::fs::create_dir_all(out_dir).map_err(|source| WriteError { path: out_dir.to_path_buf(), source })?;
    let mut used = HashSet::new();
    let mut paths = Vec::with_capacity(artifacts.len());
    for artifact in artifacts {
        let safe = sanitize_filename(&artifact.filename);
        let mut name = safe.clone();
        let mut n = 2;
        while !used.insert(name.clone()) {
            name = match safe.rsplit_once('.') {
                Some((stem, ext)) => format!("{stem}-{n}.{ext}"),
                None => format!("{safe}-{n}"),
            };
            n += 1;
        }
        let path = out_dir.join(&name);
        let source = artifact.source.replace("\r\n", "\n").replace('\r', "\n");
        std::fs::write(&path, source).map_err(|source| WriteError { path: path.clone(), source })?;
        paths.push(path);
    }
    Ok(paths)
}

fn sanitize_filename(name: &str) -> String {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    let cleaned: String =
        base.chars().map(|c| if c.is_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect();
    let cleaned = cleaned.trim_start_matches('.').to_string();
    if cleaned.is_empty() {
        "artifact.txt".to_string()
    } else {
        cleaned
    }
}

/// Replaces every fenced block in `markdown` with `[code artifact: <name>]`.
pub fn strip_code(markdown: &str) -> String {
    let names: Vec<String> = extract_code(markdown).into_iter().map(|a| a.filename).collect();
    let blocks = fenced_blocks(markdown);
    let lines: Vec<&str> = markdown.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    let mut i = 0;
    let mut b = 0;
    while i < lines.len() {
        if let Some(block) = blocks.get(b).filter(|blk| blk.open_line == i) {
            out.push(format!("[code artifact: {}]", names[b]));
            i = block.close_line + 1;
            b += 1;
        } else {
            out.push(lines[i].to_string());
            i += 1;
        }
    }
    let mut text = out.join("\n");
    if markdown.ends_with('\n') {
        text.push('\n');
    }
    text
}

pub const HEADER_FIELDS: [&str; 4] = ["Scenario", "Model", "Ablation", "Stages"];

/// The final report: a run header followed by every present report, in
/// pipeline order, with code blocks replaced by placeholders.
pub fn merge_reports(artifacts: &PipelineArtifacts) -> String {
    let stages: Vec<String> =
        artifacts.status.stages.iter().map(|(stage, outcome)| format!("{stage} {outcome}")).collect();
    let mut out = format!(
        "# Final Report\n\n- Scenario: {} ({})\n- Model: {}\n- Ablation: {}\n- Stages: {}\n",
        artifacts.scenario.id,
        artifacts.scenario.title,
        artifacts.model_id,
        artifacts.ablation.condition_name(),
        stages.join("; "),
    );
    let reports = [
        artifacts.analysis.as_ref().map(|r| r.raw_markdown.as_str()),
        artifacts.design.as_ref().map(|r| r.raw_markdown.as_str()),
        artifacts.rl.as_ref().map(|r| r.raw_markdown.as_str()),
    ];
    for raw in reports.into_iter().flatten() {
        out.push_str("\n---\n\n");
        out.push_str(strip_code(raw).trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bold_filename_names_block() {
        let md = "Some text\n\n**train.py**\n\n```python\nprint('hi')\n```\n";
        let a = extract_code(md);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].filename, "train.py");
        assert_eq!(a[0].language_tag, "python");
        assert_eq!(a[0].source, "print('hi')\n");
    }

    #[test]
    fn unlabeled_blocks_get_canonical_names() {
        let md = "```\na\n```\ntext\n```\nb\n```\n```\nc\n```\n```\nd\n```\n";
        let names: Vec<_> = extract_code(md).into_iter().map(|a| a.filename).collect();
        assert_eq!(names, vec!["env.py", "train.py", "eval.py", "block_4.txt"]);
        assert_eq!(extract_code(md)[0].language_tag, "unknown");
    }

    #[test]
    fn no_fences_no_artifacts() {
        assert!(extract_code("# Title\nno code here\n").is_empty());
        assert!(extract_code("").is_empty());
    }

    #[test]
    fn name_attribute_wins() {
        let md = "### env.py\n```python name=world.py\nx = 1\n```\n";
        assert_eq!(extract_code(md)[0].filename, "world.py");
    }

    #[test]
    fn heading_filename_does_not_leak_past_a_block() {
        let md = "### Environment Definition (env.py)\n```python\na\n```\n```python\nb\n```\n";
        let names: Vec<_> = extract_code(md).into_iter().map(|a| a.filename).collect();
        assert_eq!(names, vec!["env.py", "train.py"]);
    }

    #[test]
    fn tilde_fences_and_rlspec() {
        let md = "~~~rlspec\nalgorithm: PPO\n~~~\n```python\nx\n```\n";
        let a = extract_code(md);
        assert_eq!(a[0].filename, RLSPEC_FILE);
        assert!(a[0].is_rlspec());
        assert_eq!(a[1].filename, "env.py");
    }

    #[test]
    fn indented_code_is_ignored() {
        let md = "text\n\n    ```\n    not a fence\n    ```\n";
        assert!(extract_code(md).is_empty());
    }

    #[test]
    fn strip_code_leaves_placeholders() {
        let md = "# R\n**env.py**\n```python\nx\n```\nafter\n```rlspec\na: b\n```\n";
        let stripped = strip_code(md);
        assert!(!stripped.contains("```"));
        assert!(stripped.contains("[code artifact: env.py]"));
        assert!(stripped.contains("[code artifact: rlspec.txt]"));
        assert!(stripped.contains("after"));
    }

    #[test]
    fn write_files_with_collisions() {
        let dir = tempfile::tempdir().unwrap();
        let arts = vec![
            CodeArtifact { filename: "env.py".into(), language_tag: "python".into(), source: "a\r\nb\n".into() },
            CodeArtifact { filename: "env.py".into(), language_tag: "python".into(), source: "c\n".into() },
        ];
        let paths = write_code_files(&arts, dir.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, vec!["env.py", "env-2.py"]);
        assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), "a\nb\n");
        assert!(write_code_files(&[], &dir.path().join("empty")).unwrap().is_empty());
        assert!(dir.path().join("empty").is_dir());
    }
}
