//! Task scenarios: the geometric and textual definition of one robotic task,
//! the built-in fixture set, the scenario file format, and the three
//! description-length renderings fed to the first pipeline agent.

use crate::geometry::{fmt_num, Point2};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_MAX_LINKS: usize = 3;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}

fn default_max_links() -> usize {
    DEFAULT_MAX_LINKS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScenario {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub base_options: Vec<Point2>,
    #[serde(default)]
    pub targets: Vec<Point2>,
    #[serde(default)]
    pub link_options: Vec<f64>,
    #[serde(default = "default_max_links")]
    pub max_links_per_robot: usize,
}

impl TaskScenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |m: &str| Err(ScenarioError::Validation(m.to_string()));
        if self.id.trim().is_empty() {
            return fail("id: empty");
        }
        if self.description.trim().is_empty() {
            return fail("description: empty");
        }
        if self.base_options.is_empty() {
            return fail("base_options: empty");
        }
        if self.targets.is_empty() {
            return fail("targets: empty");
        }
        if self.link_options.is_empty() {
            return fail("link_options: empty");
        }
        if self.base_options.iter().any(|p| !p.is_finite()) {
            return fail("base_options: non-finite coordinate");
        }
        if self.targets.iter().any(|p| !p.is_finite()) {
            return fail("targets: non-finite coordinate");
        }
        if self.link_options.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return fail("link_options: must be > 0");
        }
        if self.max_links_per_robot == 0 {
            return fail("max_links_per_robot: must be >= 1");
        }
        Ok(())
    }

    /// Serializes to the scenario file format (pretty JSON).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(bytes: &[u8]) -> Result<TaskScenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let scenario: TaskScenario = serde_path_to_error::deserialize(de)
        .map_err(|e| ScenarioError::Parse { field: e.path().to_string(), message: e.inner().to_string() })?;
    scenario.validate()?;
    Ok(scenario)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DescriptionLength {
    Short,
    Normal,
    Long,
}

impl DescriptionLength {
    pub const ALL: [DescriptionLength; 3] = [Self::Short, Self::Normal, Self::Long];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Short => "short",
            Self::Normal => "normal",
            Self::Long => "long",
        }
    }
}

impl fmt::Display for DescriptionLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DescriptionLength {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "short" => Ok(Self::Short),
            "normal" => Ok(Self::Normal),
            "long" => Ok(Self::Long),
            other => Err(format!("unknown description length `{other}`")),
        }
    }
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

fn number_word(n: usize) -> String {
    const WORDS: [&str; 11] = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];
    WORDS.get(n).map(|w| w.to_string()).unwrap_or_else(|| n.to_string())
}

fn join_points(points: &[Point2], conj: &str) -> String {
    let parts: Vec<String> = points.iter().map(Point2::to_string).collect();
    join_words(&parts, conj)
}

fn join_words(parts: &[String], conj: &str) -> String {
    match parts {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {conj} {last}", init.join(", ")),
    }
}

fn render_short(s: &TaskScenario) -> String {
    format!("Design a robotic arm system for the {} task.", s.title)
}

fn render_normal(s: &TaskScenario) -> String {
    let links: Vec<String> = s.link_options.iter().map(|l| format!("{} m", fmt_num(*l))).collect();
    let base_clause = if s.base_options.len() == 1 {
        format!("The robot base must be installed at {}.", s.base_options[0])
    } else {
        format!(
            "The robot bases can be installed at the candidate locations {}, and each location holds at most one robot.",
            join_points(&s.base_options, "or")
        )
    };
    format!(
        "Task: {title}. A planar robotic system must be designed for this task. {base_clause} \
The work area contains {n} target points that the end effector must reach, located at {targets}. \
All coordinates are given in meters in one shared planar frame. Each robot is a serial arm with \
revolute joints, and every link must be chosen from the available lengths {links}. A robot may \
combine up to {max} links and may repeat a length. The design should reach every target while \
keeping the arms neither excessively long nor too short, so that cost stays low and a small safety \
margin remains. Motions are learned with reinforcement learning from a straight starting pose.",
        title = s.title,
        n = number_word(s.targets.len()),
        targets = join_points(&s.targets, "and"),
        links = join_words(&links, "and"),
        max = number_word(s.max_links_per_robot),
    )
}

fn render_long(s: &TaskScenario) -> String {
    let context = format!(
        "Background. {desc}\n\n\
Operating context. The {title} workcell is a planar setting: the robots move in a single horizontal \
plane, every joint is a revolute motor without hard limits, and the links are rigid. Operators expect \
the system to be analysed before anything is built, so the number of robots, the base placement, the \
assignment of targets to robots and the choice of link lengths should all be justified. Safety matters \
because people or delicate parts may be nearby, so an arm should not be longer than it needs to be, but \
it must still reach its targets with some spare reach. Cost matters as well, since every additional \
link adds material, motors and maintenance. Once the hardware is fixed, the controller is expected to \
be learned by trial and error in simulation rather than programmed by hand, and the outcome should be \
documented with learning curves, joint motion plots and end-effector paths.",
        desc = s.description.trim(),
        title = s.title,
    );
    format!("{context}\n\nTask details. {}", render_normal(s))
}

/// Renders the scenario prose at the requested level of detail.
///
/// `Short` names the task only; `Normal` states every base, target and link
/// option in 100 to 150 words; `Long` prepends domain context to the
/// `Normal` text.
pub fn render_description(scenario: &TaskScenario, level: DescriptionLength) -> String {
    match level {
        DescriptionLength::Short => render_short(scenario),
        DescriptionLength::Normal => render_normal(scenario),
        DescriptionLength::Long => render_long(scenario),
    }
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn fixture(
    id: &str,
    title: &str,
    description: &str,
    bases: &[Point2],
    targets: &[Point2],
    links: &[f64],
) -> TaskScenario {
    TaskScenario {
        id: id.to_string(),
        title: title.to_string(),
        description: description.to_string(),
        base_options: bases.to_vec(),
        targets: targets.to_vec(),
        link_options: links.to_vec(),
        max_links_per_robot: DEFAULT_MAX_LINKS,
    }
}

/// The ten built-in task scenarios, in table order (ids "1" to "10").
pub fn builtin_scenarios() -> Vec<TaskScenario> {
    vec![
        fixture(
            "1",
            "Rehabilitation Therapy",
            "A therapy robot guides a patient's hand through a set of reaching positions above a treatment table, so the arm has to move smoothly between points placed at shoulder height in front of the patient.",
            &[p(0.0, 0.0), p(0.5, 0.0)],
            &[p(0.5, 1.2), p(0.8, 1.5), p(1.0, 1.0)],
            &[0.8, 1.0, 1.2],
        ),
        fixture(
            "2",
            "Surgical Instrument Handling",
            "An operating-room assistant hands instruments to the surgical team from a compact station beside the table, where the instrument trays and hand-over points sit close together.",
            &[p(0.0, 0.5), p(0.2, 0.3)],
            &[p(0.5, 0.5), p(0.7, 0.7), p(1.0, 0.6)],
            &[0.7, 0.9, 1.1],
        ),
        fixture(
            "3",
            "Elderly Feeding Assistance",
            "A feeding aid mounted at the edge of a dining table moves a spoon between a plate, a bowl and the mouth position of a seated person.",
            &[p(0.0, -0.5), p(-0.3, -0.5)],
            &[p(0.4, 0.2), p(0.5, 0.5), p(0.6, 0.3)],
            &[0.6, 0.8, 1.0],
        ),
        fixture(
            "4",
            "Physical Therapy Stretching",
            "A stretching assistant holds a patient's limb and carries it to several extension positions during a physiotherapy session.",
            &[p(0.5, 0.0), p(0.3, -0.2)],
            &[p(0.5, 1.0), p(0.6, 1.2), p(0.8, 1.1)],
            &[0.9, 1.1, 1.3],
        ),
        fixture(
            "5",
            "Prosthetic Limb Training",
            "A training rig presents grasp targets to a person learning to control a new prosthetic hand, placing each target at a fixed point on a practice board.",
            &[p(0.0, 0.0), p(0.2, -0.2)],
            &[p(0.3, 0.4), p(0.5, 0.6), p(0.7, 0.5)],
            &[0.7, 0.9, 1.2],
        ),
        fixture(
            "6",
            "Assembly Line Placement",
            "A placement station on an assembly line inserts parts into fixtures that pass in front of it on a conveyor.",
            &[p(0.0, 0.0), p(0.0, 0.3)],
            &[p(0.4, 0.3), p(0.6, 0.5), p(0.8, 0.4)],
            &[0.8, 1.0, 1.2],
        ),
        fixture(
            "7",
            "Warehouse Item Sorting",
            "A sorting cell in a warehouse moves items from an intake point into a row of destination bins.",
            &[p(0.0, 0.0), p(-0.5, 0.0)],
            &[p(0.5, 1.0), p(0.7, 1.2), p(1.0, 1.1)],
            &[0.9, 1.1, 1.3],
        ),
        fixture(
            "8",
            "Automobile Welding",
            "A welding cell positions a torch at several seam points on a car body panel held in a jig.",
            &[p(0.0, 0.0), p(1.2, 0.5)],
            &[p(0.4, 0.2), p(0.6, 0.3), p(0.8, 0.4)],
            &[0.7, 0.9, 1.0],
        ),
        fixture(
            "9",
            "Pick-and-Place for Electronics",
            "A bench-top cell picks small electronic components from feeders and places them onto a circuit board.",
            &[p(0.0, 0.0), p(0.2, 0.3)],
            &[p(0.3, 0.4), p(0.5, 0.5), p(0.7, 0.6)],
            &[0.6, 0.8, 1.0],
        ),
        fixture(
            "10",
            "Palletizing in Logistics",
            "A palletizing station stacks cartons onto a pallet at several layer positions at the end of a packing line.",
            &[p(0.0, 0.0), p(0.5, 0.5)],
            &[p(0.4, 0.5), p(0.6, 0.7), p(0.8, 1.0)],
            &[0.9, 1.2, 1.5],
        ),
    ]
}

/// The factory pick-up scenario used for the ablation studies.
///
/// Two bases 10 m apart; four boxes 5 m apart on a line parallel to the base
/// line, 20 m in front of the bases' midpoint; links of 10 m, 5 m and 2 m.
pub fn example_scenario() -> TaskScenario {
    fixture(
        "example",
        "Factory Box Picking",
        "A factory floor has two robot mounting points on a common base line, and a row of boxes waiting on the floor in front of them has to be picked up.",
        &[p(-5.0, 0.0), p(5.0, 0.0)],
        &[p(-7.5, 20.0), p(-2.5, 20.0), p(2.5, 20.0), p(7.5, 20.0)],
        &[10.0, 5.0, 2.0],
    )
}

/// Looks up a built-in scenario by id (`"1"`..`"10"` or `"example"`).
pub fn find_builtin(id: &str) -> Option<TaskScenario> {
    if id.eq_ignore_ascii_case("example") {
        return Some(example_scenario());
    }
    builtin_scenarios().into_iter().find(|s| s.id == id)
}
