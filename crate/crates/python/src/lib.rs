//! Python bindings. Structured values cross the boundary as JSON: episodes
//! go in as JSON text, results come back as plain dicts and lists.

use std::path::PathBuf;

use motif_core::analyzer::{discriminate_episode, rank as rank_trajectories};
use motif_core::config::Config;
use motif_core::control::refine as refine_loop;
use motif_core::dsl::{description_similarity, format_description, parse_description};
use motif_core::eval::evaluate as evaluate_metrics;
use motif_core::generators::{generate as generate_kind, synthetic_corpus, GeneratorKind, GeneratorParams};
use motif_core::render::{render_to, RenderConfig, Representation};
use motif_core::trajectory::{Episode, SceneObject};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: motif_core::Error) -> PyErr {
    match e {
        motif_core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn config(text: Option<&str>) -> PyResult<Config> {
    match text {
        Some(t) => Config::parse(t).map_err(err),
        None => Ok(Config::default()),
    }
}

fn episode(json: &str) -> PyResult<Episode> {
    Episode::from_json(json).map_err(err)
}

/// Canonical text of a motion description.
#[pyfunction]
fn canonical(description: &str) -> PyResult<String> {
    Ok(format_description(&parse_description(description).map_err(err)?))
}

/// Parse tree of a motion description as nested dicts.
#[pyfunction]
fn parse<'py>(py: Python<'py>, description: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &parse_description(description).map_err(err)?)
}

/// TF-IDF cosine similarity of two descriptions, fitted on the pair.
#[pyfunction]
fn similarity(a: &str, b: &str) -> f64 {
    description_similarity(a, b)
}

/// Scores an episode against a description (its own when omitted).
#[pyfunction]
#[pyo3(signature = (episode_json, description=None, config_text=None))]
fn discriminate<'py>(
    py: Python<'py>,
    episode_json: &str,
    description: Option<&str>,
    config_text: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let ep = episode(episode_json)?;
    let cfg = config(config_text)?;
    let ast = parse_description(description.unwrap_or(&ep.motion_description)).map_err(err)?;
    to_py(py, &discriminate_episode(&ep, &ast, &cfg.analyzer).map_err(err)?)
}

/// Orders episodes by how well they match `description`, best first, as
/// `(index, score)` pairs. The first episode's scene is used for grounding.
#[pyfunction]
fn rank(episodes_json: Vec<String>, description: &str) -> PyResult<Vec<(usize, f64)>> {
    let eps = episodes_json.iter().map(|e| episode(e)).collect::<PyResult<Vec<_>>>()?;
    let ast = parse_description(description).map_err(err)?;
    let scene: &[SceneObject] = eps.first().map(|e| e.scene.as_slice()).unwrap_or(&[]);
    let trajs: Vec<_> = eps.iter().map(|e| e.trajectory.clone()).collect();
    Ok(rank_trajectories(&trajs, scene, &ast, &Config::default().analyzer))
}

/// Episode JSON from one generator family. `params_json` holds any
/// generator parameters; missing ones take their defaults.
#[pyfunction]
#[pyo3(signature = (kind, params_json="{}", canvas=640.0, id="gen-0000"))]
fn generate(kind: &str, params_json: &str, canvas: f64, id: &str) -> PyResult<String> {
    let k = GeneratorKind::from_name(kind).ok_or_else(|| PyValueError::new_err(format!("unknown generator {kind:?}")))?;
    if k == GeneratorKind::Detour {
        return Err(PyValueError::new_err("detours need an obstacle; use the command line tool"));
    }
    let params: GeneratorParams = serde_json::from_str(params_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let g = generate_kind(k, &params, None).map_err(err)?;
    g.into_episode(id, "move the object", "generated", canvas).to_json().map_err(err)
}

/// Seeded synthetic corpus as a list of episode JSON strings.
#[pyfunction]
#[pyo3(signature = (count, seed=0, canvas=640.0))]
fn corpus(count: usize, seed: u64, canvas: f64) -> PyResult<Vec<String>> {
    synthetic_corpus(count, seed, canvas)
        .map_err(err)?
        .iter()
        .map(|e| e.to_json().map_err(err))
        .collect()
}

/// Renders an episode into `out_dir` and returns the PNG path.
#[pyfunction]
#[pyo3(signature = (episode_json, out_dir, mode="keypoint", n=4))]
fn render(episode_json: &str, out_dir: PathBuf, mode: &str, n: usize) -> PyResult<PathBuf> {
    let ep = episode(episode_json)?;
    let rep = Representation::parse(mode, n).map_err(err)?;
    std::fs::create_dir_all(&out_dir).map_err(|e| PyOSError::new_err(e.to_string()))?;
    render_to(&ep, rep, &out_dir, &RenderConfig::default()).map_err(err)
}

/// Precision, recall and confusion counts.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, predictions: Vec<u8>, labels: Vec<u8>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &evaluate_metrics(&predictions, &labels).map_err(err)?)
}

/// Runs the refinement loop from an empty scene and returns its trace.
#[pyfunction]
#[pyo3(signature = (task, description, budget=25, theta_loop=0.9))]
fn refine<'py>(
    py: Python<'py>,
    task: &str,
    description: &str,
    budget: usize,
    theta_loop: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let ast = parse_description(description).map_err(err)?;
    let trace = refine_loop(task, &ast, &[], budget, theta_loop, &Config::default().analyzer).map_err(err)?;
    to_py(py, &trace)
}

#[pymodule]
fn motif(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(discriminate, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(refine, m)?)?;
    Ok(())
}
