//! HTTP mirror-sync client. Fetches the remote manifest, downloads any files
//! whose local digest differs, verifies every download against its SHA-256,
//! and swaps a fully verified staging tree into place so a failed sync can
//! never corrupt the local data directory.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use kabaddi_core::ingest::{safe_relative_path, sha256_hex, well_formed_digest, Manifest};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SyncError {
    #[error("failed to fetch {url}: {message}")]
    Fetch { url: String, message: String },
    #[error("remote manifest invalid: {0}")]
    BadManifest(String),
    #[error("sync io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SyncError + '_ {
    move |source| SyncError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone)]
pub struct SyncOptions {
    pub base_url: String,
    pub data_dir: PathBuf,
    pub verify_only: bool,
    pub max_parallel: usize,
}

/// What a sync run did: files fetched, files already current, files whose
/// digest checked out, and files that failed (download or digest).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SyncSummary {
    pub downloaded: usize,
    pub skipped: usize,
    pub verified: usize,
    pub failed: usize,
}

const RETRIES: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(100);

fn fetch(url: &str) -> Result<Vec<u8>, SyncError> {
    let mut last = String::new();
    for attempt in 0..RETRIES {
        if attempt > 0 {
            std::thread::sleep(BACKOFF_BASE * 2u32.pow(attempt - 1));
        }
        match ureq::get(url).call() {
            Ok(mut response) => {
                let mut bytes = Vec::new();
                match response.body_mut().as_reader().read_to_end(&mut bytes) {
                    Ok(_) => return Ok(bytes),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(SyncError::Fetch { url: url.to_string(), message: last })
}

fn join_url(base: &str, path: &str) -> String {
    format!("{}/{}", base.trim_end_matches('/'), path)
}

fn local_digest(path: &Path) -> Option<String> {
    std::fs::read(path).ok().map(|bytes| sha256_hex(&bytes))
}

struct Download {
    path: String,
    sha256: String,
}

enum Outcome {
    Fetched { path: String, bytes: Vec<u8> },
    Failed { path: String, reason: String },
}

fn download_all(base_url: &str, wanted: Vec<Download>, max_parallel: usize) -> Vec<Outcome> {
    let queue = Mutex::new(wanted);
    let results = Mutex::new(Vec::new());
    let workers = max_parallel.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let item = { queue.lock().expect("queue lock").pop() };
                let Some(item) = item else { break };
                let url = join_url(base_url, &item.path);
                let outcome = match fetch(&url) {
                    Ok(bytes) => {
                        if sha256_hex(&bytes) == item.sha256.to_ascii_lowercase() {
                            Outcome::Fetched { path: item.path, bytes }
                        } else {
                            Outcome::Failed {
                                path: item.path,
                                reason: "digest mismatch after download".into(),
                            }
                        }
                    }
                    Err(e) => Outcome::Failed { path: item.path, reason: e.to_string() },
                };
                results.lock().expect("results lock").push(outcome);
            });
        }
    });
    results.into_inner().expect("results")
}

/// Runs one sync. In `verify_only` mode nothing is written; the summary
/// reports local files in agreement (`verified`) and drifted or missing
/// files (`failed`).
pub fn run_sync(opts: &SyncOptions) -> Result<SyncSummary, SyncError> {
    let manifest_url = join_url(&opts.base_url, "manifest.json");
    let manifest_bytes = fetch(&manifest_url)?;
    let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| SyncError::BadManifest(e.to_string()))?;
    if manifest.version != 1 {
        return Err(SyncError::BadManifest(format!(
            "version {} is not supported (expected 1)",
            manifest.version
        )));
    }

    let mut summary = SyncSummary::default();

    if opts.verify_only {
        for entry in &manifest.files {
            if !safe_relative_path(&entry.path) || !well_formed_digest(&entry.sha256) {
                summary.failed += 1;
                continue;
            }
            match local_digest(&opts.data_dir.join(&entry.path)) {
                Some(digest) if digest == entry.sha256.to_ascii_lowercase() => {
                    summary.verified += 1
                }
                _ => summary.failed += 1,
            }
        }
        return Ok(summary);
    }

    let mut up_to_date = Vec::new();
    let mut wanted = Vec::new();
    for entry in &manifest.files {
        if !safe_relative_path(&entry.path) {
            eprintln!("sync: refusing unsafe manifest path {:?}", entry.path);
            summary.failed += 1;
            continue;
        }
        if !well_formed_digest(&entry.sha256) {
            eprintln!("sync: {}: manifest digest is not 64 hex characters", entry.path);
            summary.failed += 1;
            continue;
        }
        match local_digest(&opts.data_dir.join(&entry.path)) {
            Some(digest) if digest == entry.sha256.to_ascii_lowercase() => {
                up_to_date.push(entry.path.clone());
                summary.skipped += 1;
                summary.verified += 1;
            }
            _ => wanted.push(Download { path: entry.path.clone(), sha256: entry.sha256.clone() }),
        }
    }

    let outcomes = download_all(&opts.base_url, wanted, opts.max_parallel);
    let mut fetched: Vec<(String, Vec<u8>)> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Fetched { path, bytes } => {
                summary.downloaded += 1;
                summary.verified += 1;
                fetched.push((path, bytes));
            }
            Outcome::Failed { path, reason } => {
                eprintln!("sync: {path}: {reason}");
                summary.failed += 1;
            }
        }
    }

    if summary.failed > 0 {
        // Swap aborted; the local directory is untouched.
        return Ok(summary);
    }

    // Assemble the complete new tree in a staging directory beside the
    // target, then swap. Unchanged files are copied from the live tree.
    let parent = opts.data_dir.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    let dir_name = opts
        .data_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".to_string());
    let staging = parent.join(format!(".{dir_name}.sync-staging"));
    let retired = parent.join(format!(".{dir_name}.sync-old"));
    for leftovers in [&staging, &retired] {
        if leftovers.exists() {
            std::fs::remove_dir_all(leftovers).map_err(io_err(leftovers))?;
        }
    }
    std::fs::create_dir_all(&staging).map_err(io_err(&staging))?;

    let write_into = |rel: &str, bytes: &[u8]| -> Result<(), SyncError> {
        let dest = staging.join(rel);
        if let Some(dir) = dest.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        std::fs::write(&dest, bytes).map_err(io_err(&dest))
    };
    for (path, bytes) in &fetched {
        write_into(path, bytes)?;
    }
    for path in &up_to_date {
        let src = opts.data_dir.join(path);
        let bytes = std::fs::read(&src).map_err(io_err(&src))?;
        write_into(path, &bytes)?;
    }
    write_into("manifest.json", &manifest_bytes)?;

    // Two renames; the window without a data directory is tiny and a crash
    // leaves the complete staging tree intact beside it.
    if opts.data_dir.exists() {
        std::fs::rename(&opts.data_dir, &retired).map_err(io_err(&opts.data_dir))?;
    }
    std::fs::rename(&staging, &opts.data_dir).map_err(io_err(&staging))?;
    if retired.exists() {
        std::fs::remove_dir_all(&retired).map_err(io_err(&retired))?;
    }
    Ok(summary)
}
