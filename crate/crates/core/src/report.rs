//! Structured views of the three agent reports and the tolerant Markdown
//! parser that produces them.
//!
//! Section headings are matched fuzzily: numbering, Markdown emphasis and
//! punctuation are stripped, the remaining words are lowercased and
//! de-pluralized, and a line opens a section when it covers at least 80% of
//! the required heading's words.

use crate::extract::{extract_code, CodeArtifact};
use crate::geometry::Point2;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;
use thiserror::Error;

pub const TASK_ANALYSIS_HEADINGS: [&str; 5] = [
    "Number of Targets to be Reached",
    "Number of Robots to be Built",
    "Base Location Options",
    "Arm Link Length Options",
    "Arm Choices Information",
];

pub const ROBOT_DESIGN_HEADINGS: [&str; 5] = [
    "Required Number of Robots",
    "Selected Base Location",
    "Design Decisions for Robotic Arms",
    "Final Robotic Arm Configuration",
    "Summary",
];

pub const RL_DESIGN_HEADINGS: [&str; 5] = [
    "Environment Design",
    "Motor Motion Definition",
    "Reinforcement Learning Algorithm Selection",
    "Success and Failure Criteria",
    "Initial Conditions",
];

const MATCH_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReportKind {
    TaskAnalysis,
    RobotDesign,
    RlDesign,
}

impl ReportKind {
    pub fn headings(&self) -> &'static [&'static str; 5] {
        match self {
            Self::TaskAnalysis => &TASK_ANALYSIS_HEADINGS,
            Self::RobotDesign => &ROBOT_DESIGN_HEADINGS,
            Self::RlDesign => &RL_DESIGN_HEADINGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("report is empty")]
    Empty,
    #[error("missing required sections: {}", .0.join(", "))]
    MissingSections(Vec<String>),
    #[error("cannot extract {field} from section \"{section}\" (line: {line:?})")]
    Extraction { field: String, section: String, line: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAnalysisReport {
    pub raw_markdown: String,
    pub num_targets: usize,
    pub targets: Vec<Point2>,
    pub num_robots: usize,
    pub base_options: Vec<Point2>,
    pub link_options: Vec<f64>,
    pub arm_choices_notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmConfigEntry {
    pub robot: usize,
    pub links: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotDesignReport {
    pub raw_markdown: String,
    pub required_robots: usize,
    pub selected_bases: Vec<Point2>,
    /// Targets listed next to each selected base, when the report states them.
    pub assigned_targets: Vec<Vec<Point2>>,
    pub design_rationale: String,
    pub arm_configurations: Vec<ArmConfigEntry>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    Ppo,
    Sac,
    Cem,
    Other(String),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ppo => f.write_str("PPO"),
            Self::Sac => f.write_str("SAC"),
            Self::Cem => f.write_str("CEM"),
            Self::Other(s) => f.write_str(s),
        }
    }
}

impl Algorithm {
    pub fn parse_name(s: &str) -> Algorithm {
        detect_algorithm(s).unwrap_or_else(|| Algorithm::Other(s.trim().to_string()))
    }
}

/// Raw `key: value` entries of an `rlspec` fenced block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RlSpecBlock {
    pub entries: BTreeMap<String, String>,
}

impl RlSpecBlock {
    pub fn parse(body: &str) -> RlSpecBlock {
        let mut entries = BTreeMap::new();
        for line in body.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(idx) = line.find([':', '=']) else {
                continue;
            };
            let key = line[..idx].trim().to_ascii_lowercase().replace([' ', '-'], "_");
            let value = line[idx + 1..].trim().to_string();
            if !key.is_empty() {
                entries.insert(key, value);
            }
        }
        RlSpecBlock { entries }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlDesignReport {
    pub raw_markdown: String,
    pub env_design: String,
    pub motor_motion: String,
    pub algorithm: Algorithm,
    pub success_failure_criteria: String,
    pub initial_conditions: String,
    pub code_blocks: Vec<CodeArtifact>,
    pub rlspec: Option<RlSpecBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    TaskAnalysis(TaskAnalysisReport),
    RobotDesign(RobotDesignReport),
    RlDesign(RlDesignReport),
}

/// One located section of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// The heading line as written.
    pub heading_line: String,
    /// Text after the heading's colon on the same line plus following lines.
    pub body: String,
}

impl Section {
    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.body.lines()
    }
}

static NUMBERING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(?:(?:section|step|part)\s*)?\(?\d+(?:\.\d+)*\s*[.):\-]?\s*").unwrap());

fn normalize_tokens(label: &str) -> Vec<String> {
    label
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t.len() > 3 && t.ends_with('s') && !t.ends_with("ss") {
                t[..t.len() - 1].to_string()
            } else {
                t.to_string()
            }
        })
        .collect()
}

/// Splits a candidate heading line into (label, inline rest).
fn heading_label(line: &str) -> Option<(String, String, bool)> {
    let mut s = line.trim();
    let is_md_heading = s.starts_with('#');
    s = s.trim_start_matches('#').trim_start();
    for bullet in ["- ", "* ", "+ "] {
        if let Some(rest) = s.strip_prefix(bullet) {
            s = rest.trim_start();
        }
    }
    let s = s.replace("**", "").replace("__", "");
    let s = NUMBERING.replace(s.trim(), "").to_string();
    let (label, rest) = match s.find(':') {
        Some(idx) => (s[..idx].to_string(), s[idx + 1..].trim().to_string()),
        None => (s.clone(), String::new()),
    };
    let label = label.trim().trim_matches(|c: char| c == '*' || c == '_').to_string();
    if label.is_empty() {
        None
    } else {
        Some((label, rest, is_md_heading))
    }
}

fn match_score(label_tokens: &[String], required: &[String]) -> f64 {
    if label_tokens.is_empty() || label_tokens.len() > required.len() + 3 {
        return 0.0;
    }
    let hits = required.iter().filter(|t| label_tokens.contains(t)).count();
    hits as f64 / required.len() as f64
}

/// Locates each required heading in `markdown`, ignoring fenced code.
///
/// Returns one entry per heading, `None` when the heading is absent.
pub fn locate_sections(markdown: &str, headings: &[&str]) -> Vec<Option<Section>> {
    let required: Vec<Vec<String>> = headings.iter().map(|h| normalize_tokens(h)).collect();
    let mut found: Vec<Option<Section>> = vec![None; headings.len()];
    let mut current: Option<usize> = None;
    let mut fence: Option<String> = None;

    for line in markdown.lines() {
        if let Some(marker) = &fence {
            if closes_fence(line, marker) {
                fence = None;
            }
            if let Some(i) = current {
                push_line(&mut found[i], line);
            }
            continue;
        }
        if let Some(marker) = line_fence(line) {
            fence = Some(marker);
            if let Some(i) = current {
                push_line(&mut found[i], line);
            }
            continue;
        }

        let mut matched = None;
        let mut is_md_heading = false;
        if let Some((label, rest, md)) = heading_label(line) {
            is_md_heading = md;
            let tokens = normalize_tokens(&label);
            let mut best = (0.0, usize::MAX);
            for (i, req) in required.iter().enumerate() {
                let score = match_score(&tokens, req);
                if score >= MATCH_THRESHOLD && score > best.0 && found[i].is_none() {
                    best = (score, i);
                }
            }
            if best.1 != usize::MAX {
                matched = Some((best.1, rest));
            }
        }
        match matched {
            Some((i, rest)) => {
                found[i] = Some(Section { heading_line: line.trim().to_string(), body: rest });
                current = Some(i);
            }
            None if is_md_heading => current = None,
            None => {
                if let Some(i) = current {
                    push_line(&mut found[i], line);
                }
            }
        }
    }
    found
}

fn push_line(section: &mut Option<Section>, line: &str) {
    if let Some(s) = section {
        if !s.body.is_empty() {
            s.body.push('\n');
        }
        s.body.push_str(line);
    }
}

/// The fence marker opening `line`, if it opens a fenced block: at most
/// three spaces of indentation (four or more make indented code).
pub(crate) fn line_fence(line: &str) -> Option<String> {
    let trimmed = line.trim_start();
    fence_marker(trimmed).filter(|_| line.len() - trimmed.len() < 4)
}

/// Whether `line` closes a block opened by `marker`: the same character,
/// at least as many of it, and nothing else.
pub(crate) fn closes_fence(line: &str, marker: &str) -> bool {
    let t = line.trim_start();
    let ch = marker.chars().next().expect("non-empty marker");
    t.starts_with(marker) && t.trim_start_matches(ch).trim().is_empty()
}

fn fence_marker(trimmed: &str) -> Option<String> {
    for ch in ['`', '~'] {
        let n = trimmed.chars().take_while(|c| *c == ch).count();
        if n >= 3 {
            return Some(std::iter::repeat_n(ch, n).collect());
        }
    }
    None
}

fn require_sections(markdown: &str, kind: ReportKind) -> Result<Vec<Section>, ReportError> {
    if markdown.trim().is_empty() {
        return Err(ReportError::Empty);
    }
    let headings = kind.headings();
    let located = locate_sections(markdown, headings);
    let missing: Vec<String> =
        located.iter().zip(headings.iter()).filter(|(s, _)| s.is_none()).map(|(_, h)| h.to_string()).collect();
    if !missing.is_empty() {
        return Err(ReportError::MissingSections(missing));
    }
    Ok(located.into_iter().map(Option::unwrap).collect())
}

static POINT_PAREN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\(\s*([+-]?\d+(?:\.\d+)?)\s*(?:m\b)?\s*,\s*([+-]?\d+(?:\.\d+)?)\s*(?:m\b)?\s*\)").unwrap()
});

static POINT_BARE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([+-]?\d+(?:\.\d+)?)\s*(?:m\b)?\s*,\s*([+-]?\d+(?:\.\d+)?)\s*(?:m\b)?").unwrap());

static LENGTH: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)([+-]?\d+(?:\.\d+)?)\s*(?:m|meters?|metres?)\b").unwrap());

static INTEGER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(\d+|one|two|three|four|five|six|seven|eight|nine|ten)\b").unwrap());

static ROBOT_INDEX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:robot|arm)\s*#?\s*(\d+)").unwrap());

fn normalize_text(text: &str) -> String {
    text.replace(['\u{2212}', '\u{2013}'], "-")
}

/// Parenthesized coordinate pairs `(x, y)`, with optional `m` units.
pub fn scan_points(text: &str) -> Vec<Point2> {
    let text = normalize_text(text);
    POINT_PAREN.captures_iter(&text).filter_map(|c| Some(Point2::new(c[1].parse().ok()?, c[2].parse().ok()?))).collect()
}

/// Coordinate pairs in either `(x, y)` or bare `x, y` form; bare pairs are
/// only considered when no parenthesized pair is present.
pub fn scan_points_loose(text: &str) -> Vec<Point2> {
    let strict = scan_points(text);
    if !strict.is_empty() {
        return strict;
    }
    let text = normalize_text(text);
    POINT_BARE.captures_iter(&text).filter_map(|c| Some(Point2::new(c[1].parse().ok()?, c[2].parse().ok()?))).collect()
}

/// Unit-suffixed lengths (`0.8m`, `1.2 m`, `2 meters`), skipping numbers that
/// belong to coordinate pairs.
pub fn scan_lengths(text: &str) -> Vec<f64> {
    let text = normalize_text(text);
    let without_points = POINT_PAREN.replace_all(&text, " ");
    LENGTH.captures_iter(&without_points).filter_map(|c| c[1].parse().ok()).collect()
}

fn scan_integer(text: &str) -> Option<usize> {
    let text = normalize_text(text);
    let without_points = POINT_PAREN.replace_all(&text, " ");
    let without_lengths = LENGTH.replace_all(&without_points, " ");
    for c in INTEGER.captures_iter(&without_lengths) {
        let m = c.get(1).unwrap();
        // skip the integer part of a decimal like 1.5
        let after = &without_lengths[m.end()..];
        if after.starts_with('.') && after[1..].starts_with(|ch: char| ch.is_ascii_digit()) {
            continue;
        }
        let word = m.as_str().to_ascii_lowercase();
        let v = match word.as_str() {
            "one" => 1,
            "two" => 2,
            "three" => 3,
            "four" => 4,
            "five" => 5,
            "six" => 6,
            "seven" => 7,
            "eight" => 8,
            "nine" => 9,
            "ten" => 10,
            digits => match digits.parse() {
                Ok(v) => v,
                Err(_) => continue,
            },
        };
        return Some(v);
    }
    None
}

fn detect_algorithm(text: &str) -> Option<Algorithm> {
    let lower = text.to_lowercase();
    let candidates = [
        ("ppo", Algorithm::Ppo),
        ("proximal policy", Algorithm::Ppo),
        ("sac", Algorithm::Sac),
        ("soft actor", Algorithm::Sac),
        ("cem", Algorithm::Cem),
        ("cross-entropy", Algorithm::Cem),
        ("cross entropy", Algorithm::Cem),
    ];
    let mut best: Option<(usize, Algorithm)> = None;
    for (needle, alg) in candidates {
        let mut search = 0;
        while let Some(pos) = lower[search..].find(needle) {
            let at = search + pos;
            let before_ok = at == 0 || !lower.as_bytes()[at - 1].is_ascii_alphanumeric();
            let end = at + needle.len();
            let after_ok = end >= lower.len() || !lower.as_bytes()[end].is_ascii_alphanumeric();
            if before_ok && after_ok {
                if best.as_ref().is_none_or(|(b, _)| at < *b) {
                    best = Some((at, alg.clone()));
                }
                break;
            }
            search = end;
        }
    }
    best.map(|(_, a)| a)
}

fn first_line(text: &str) -> String {
    text.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim().to_string()
}

fn extraction_error(field: &str, section: &Section) -> ReportError {
    ReportError::Extraction {
        field: field.to_string(),
        section: section.heading_line.clone(),
        line: if section.body.trim().is_empty() { section.heading_line.clone() } else { first_line(&section.body) },
    }
}

pub fn parse_task_analysis(markdown: &str) -> Result<TaskAnalysisReport, ReportError> {
    let s = require_sections(markdown, ReportKind::TaskAnalysis)?;
    let targets = scan_points_loose(&s[0].body);
    if targets.is_empty() {
        return Err(extraction_error("target coordinates", &s[0]));
    }
    let num_targets = scan_integer(&s[0].body).filter(|n| *n >= 1).unwrap_or(targets.len());
    let num_robots =
        scan_integer(&s[1].body).filter(|n| *n >= 1).ok_or_else(|| extraction_error("number of robots", &s[1]))?;
    let base_options = scan_points_loose(&s[2].body);
    if base_options.is_empty() {
        return Err(extraction_error("base coordinates", &s[2]));
    }
    let link_options = scan_lengths(&s[3].body);
    if link_options.is_empty() {
        return Err(extraction_error("link lengths", &s[3]));
    }
    Ok(TaskAnalysisReport {
        raw_markdown: markdown.to_string(),
        num_targets,
        targets,
        num_robots,
        base_options,
        link_options,
        arm_choices_notes: s[4].body.trim().to_string(),
    })
}

pub fn parse_robot_design(markdown: &str) -> Result<RobotDesignReport, ReportError> {
    let s = require_sections(markdown, ReportKind::RobotDesign)?;
    let required_robots =
        scan_integer(&s[0].body).filter(|n| *n >= 1).ok_or_else(|| extraction_error("number of robots", &s[0]))?;

    let mut selected_bases = Vec::new();
    let mut assigned_targets = Vec::new();
    for line in s[1].lines() {
        let pts = scan_points(line);
        if let Some((base, rest)) = pts.split_first() {
            selected_bases.push(*base);
            assigned_targets.push(rest.to_vec());
        }
    }
    if selected_bases.is_empty() {
        selected_bases = scan_points_loose(&s[1].body);
        assigned_targets.clear();
    }
    if selected_bases.is_empty() {
        return Err(extraction_error("base coordinates", &s[1]));
    }
    if assigned_targets.iter().all(Vec::is_empty) {
        assigned_targets.clear();
    }

    let mut arm_configurations = Vec::new();
    for line in s[3].lines() {
        let line = TOTAL_CLAUSE.replace_all(line, "");
        let links = scan_lengths(&line);
        if links.is_empty() {
            continue;
        }
        let robot = ROBOT_INDEX.captures(&line).and_then(|c| c[1].parse().ok()).unwrap_or(arm_configurations.len() + 1);
        arm_configurations.push(ArmConfigEntry { robot, links });
    }
    if arm_configurations.is_empty() {
        return Err(extraction_error("arm link lengths", &s[3]));
    }
    if arm_configurations.len() != required_robots {
        return Err(ReportError::Extraction {
            field: format!("arm configurations ({} found for {} robots)", arm_configurations.len(), required_robots),
            section: s[3].heading_line.clone(),
            line: first_line(&s[3].body),
        });
    }
    Ok(RobotDesignReport {
        raw_markdown: markdown.to_string(),
        required_robots,
        selected_bases,
        assigned_targets,
        design_rationale: s[2].body.trim().to_string(),
        arm_configurations,
        summary: s[4].body.trim().to_string(),
    })
}

static TOTAL_CLAUSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:total|sum|reach)\b[^;\n]*").unwrap());

static ALGORITHM_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^[\s*\-]*(?:selected\s+)?algorithm\**\s*:\s*(.+)$").unwrap());

pub fn parse_rl_design(markdown: &str) -> Result<RlDesignReport, ReportError> {
    let s = require_sections(markdown, ReportKind::RlDesign)?;
    let algorithm = ALGORITHM_LINE
        .captures_iter(&s[2].body)
        .chain(ALGORITHM_LINE.captures_iter(markdown))
        .find_map(|c| detect_algorithm(&c[1]))
        .or_else(|| detect_algorithm(&s[2].body))
        .unwrap_or_else(|| Algorithm::Other(first_line(&s[2].body)));
    let code_blocks = extract_code(markdown);
    let rlspec = code_blocks.iter().find(|a| a.is_rlspec()).map(|a| RlSpecBlock::parse(&a.source));
    let body = |i: usize| s[i].body.trim().to_string();
    Ok(RlDesignReport {
        raw_markdown: markdown.to_string(),
        env_design: body(0),
        motor_motion: body(1),
        algorithm,
        success_failure_criteria: body(3),
        initial_conditions: body(4),
        code_blocks,
        rlspec,
    })
}

/// Parses `markdown` against the schema of `kind`.
pub fn parse_report(markdown: &str, kind: ReportKind) -> Result<Report, ReportError> {
    Ok(match kind {
        ReportKind::TaskAnalysis => Report::TaskAnalysis(parse_task_analysis(markdown)?),
        ReportKind::RobotDesign => Report::RobotDesign(parse_robot_design(markdown)?),
        ReportKind::RlDesign => Report::RlDesign(parse_rl_design(markdown)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANALYSIS: &str = "\
# Task Analysis Report

## 1. Number of Targets to be Reached
There are 3 targets: (0.5,1.2), (0.8,1.5), (1.0,1.0).

## 2. Number of Robots to be Built
One robot is sufficient.

## 3. Base Location Options
Base Location Options: (0,0) or (0.5,0)

## 4. Arm Link Length Options
0.8m, 1.0m, 1.2m (unchanged)

## 5. Arm Choices Information
Links may be repeated; up to three links per arm.
";

    #[test]
    fn task_analysis_fields() {
        let r = parse_task_analysis(ANALYSIS).unwrap();
        assert_eq!(r.num_targets, 3);
        assert_eq!(r.num_robots, 1);
        assert_eq!(r.base_options, vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)]);
        assert_eq!(r.link_options, vec![0.8, 1.0, 1.2]);
        assert_eq!(r.targets.len(), 3);
        assert_eq!(r.raw_markdown, ANALYSIS);
    }

    #[test]
    fn inline_heading_with_colon() {
        let md = "Number of Targets to be Reached: (1,1)\nNumber of Robots to be Built: 1\n\
Base Location Options: (0,0) or (0.5,0)\nArm Link Length Options: 1 m\nArm Choices Information: none\n";
        let r = parse_task_analysis(md).unwrap();
        assert_eq!(r.base_options, vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)]);
    }

    #[test]
    fn renumbered_headings_parse_identically() {
        let permuted = ANALYSIS
            .replace("## 1.", "## 3)")
            .replace("## 3.", "## 1)")
            .replace("## 2.", "### Step 5:")
            .replace("## 5.", "## 2 -");
        let a = parse_task_analysis(ANALYSIS).unwrap();
        let b = parse_task_analysis(&permuted).unwrap();
        assert_eq!(a.targets, b.targets);
        assert_eq!(a.base_options, b.base_options);
        assert_eq!(a.link_options, b.link_options);
        assert_eq!(a.num_robots, b.num_robots);
    }

    #[test]
    fn missing_summary_is_schema_error() {
        let md = "1. Required Number of Robots\n1\n2. Selected Base Location\n(0.5, 0)\n\
3. Design Decisions for Robotic Arms\ncheap\n4. Final Robotic Arm Configuration\nRobot 1: 0.8 m, 0.8 m\n";
        let err = parse_robot_design(md).unwrap_err();
        assert_eq!(err, ReportError::MissingSections(vec!["Summary".to_string()]));
    }

    #[test]
    fn robot_design_fields() {
        let md = "## 1. Required Number of Robots\n1 robot.\n## 2. Selected Base Location\n\
- Robot 1: base (0.5, 0), targets (0.5, 1.2), (1, 1)\n## 3. Design Decisions for Robotic Arms\nShortest.\n\
## 4. Final Robotic Arm Configuration\n- Robot 1: 0.8 m + 0.8 m (total 1.6 m)\n## 5. Summary\nDone.\n";
        let r = parse_robot_design(md).unwrap();
        assert_eq!(r.selected_bases, vec![Point2::new(0.5, 0.0)]);
        assert_eq!(r.assigned_targets, vec![vec![Point2::new(0.5, 1.2), Point2::new(1.0, 1.0)]]);
        assert_eq!(r.arm_configurations[0].links, vec![0.8, 0.8]);
    }

    #[test]
    fn algorithm_detection() {
        let md = "1. Environment Design\nplanar\n2. Motor Motion Definition\nvelocity\n\
3. Reinforcement Learning Algorithm Selection\nAlgorithm: PPO\n4. Success and Failure Criteria\neps\n5. Initial Conditions\nzero\n";
        assert_eq!(parse_rl_design(md).unwrap().algorithm, Algorithm::Ppo);
        let sac = md.replace("Algorithm: PPO", "We pick Soft Actor-Critic.");
        assert_eq!(parse_rl_design(&sac).unwrap().algorithm, Algorithm::Sac);
    }

    #[test]
    fn headings_inside_code_are_ignored() {
        let md = "1. Environment Design\n```python\n# Summary\n```\n";
        let found = locate_sections(md, &["Environment Design", "Summary"]);
        assert!(found[0].is_some());
        assert!(found[1].is_none());
    }

    #[test]
    fn missing_coordinates_reports_line() {
        let md = ANALYSIS.replace("Base Location Options: (0,0) or (0.5,0)", "Base Location Options: anywhere");
        match parse_task_analysis(&md).unwrap_err() {
            ReportError::Extraction { field, line, .. } => {
                assert_eq!(field, "base coordinates");
                assert!(line.contains("anywhere"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn scanners() {
        assert_eq!(scan_points("at (−0.3, −0.5 m)"), vec![Point2::new(-0.3, -0.5)]);
        assert_eq!(scan_points_loose("x 1.5, 2"), vec![Point2::new(1.5, 2.0)]);
        assert_eq!(scan_lengths("(0.5 m, 1 m) with 0.8m and 2 meters"), vec![0.8, 2.0]);
        assert_eq!(scan_integer("three targets at (1,2)"), Some(3));
        assert_eq!(scan_integer("(1,2) 1.5 m then 2"), Some(2));
    }
}
