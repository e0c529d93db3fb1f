use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsuka_core::loan::Applicant;

use super::{atomic_write, io_error, StoreError};

/// Called between the durable temp write and the rename; returning an error
/// simulates a crash at that point.
pub type FaultHook = Box<dyn Fn() -> io::Result<()> + Send + Sync>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    version: u64,
    applicants: Vec<Applicant>,
}

/// File-backed applicant records. Every mutation rewrites the whole snapshot
/// atomically before returning; if the write fails the in-memory state is
/// rolled back.
pub struct ApplicantStore {
    path: PathBuf,
    records: BTreeMap<String, Applicant>,
    version: u64,
    fault: Option<FaultHook>,
}

impl std::fmt::Debug for ApplicantStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApplicantStore")
            .field("path", &self.path)
            .field("records", &self.records.len())
            .field("version", &self.version)
            .finish()
    }
}

impl ApplicantStore {
    /// Opens the snapshot at `path`, starting empty if the file does not exist.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let (records, version) = match std::fs::read_to_string(&path) {
            Ok(text) => {
                let snap: Snapshot = serde_json::from_str(&text).map_err(|e| StoreError::Schema {
                    field: path.display().to_string(),
                    message: e.to_string(),
                })?;
                let mut records = BTreeMap::new();
                for a in snap.applicants {
                    if let Some(dup) = records.insert(a.id.clone(), a) {
                        return Err(StoreError::Schema {
                            field: path.display().to_string(),
                            message: format!("duplicate applicant id `{}`", dup.id),
                        });
                    }
                }
                (records, snap.version)
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => (BTreeMap::new(), 0),
            Err(e) => return Err(io_error(&path)(e)),
        };
        Ok(ApplicantStore { path, records, version, fault: None })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Number of successful saves since the file was created.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Applicant> {
        self.records.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.records.contains_key(id)
    }

    /// Records in id order.
    pub fn iter(&self) -> impl Iterator<Item = &Applicant> {
        self.records.values()
    }

    #[doc(hidden)]
    pub fn set_fault_hook(&mut self, hook: Option<FaultHook>) {
        self.fault = hook;
    }

    /// Inserts a new record. Returns `Ok(false)` without writing if the id exists.
    pub fn insert(&mut self, a: Applicant) -> Result<bool, StoreError> {
        if self.records.contains_key(&a.id) {
            return Ok(false);
        }
        let id = a.id.clone();
        self.records.insert(id.clone(), a);
        self.commit(|records| {
            records.remove(&id);
        })?;
        Ok(true)
    }

    /// Replaces an existing record. Returns `Ok(false)` if the id is unknown.
    pub fn update(&mut self, a: Applicant) -> Result<bool, StoreError> {
        let Some(old) = self.records.get_mut(&a.id) else {
            return Ok(false);
        };
        let previous = std::mem::replace(old, a);
        self.commit(move |records| {
            records.insert(previous.id.clone(), previous);
        })?;
        Ok(true)
    }

    /// Removes a record. Returns `Ok(false)` if the id is unknown.
    pub fn remove(&mut self, id: &str) -> Result<bool, StoreError> {
        let Some(previous) = self.records.remove(id) else {
            return Ok(false);
        };
        self.commit(move |records| {
            records.insert(previous.id.clone(), previous);
        })?;
        Ok(true)
    }

    fn commit(&mut self, rollback: impl FnOnce(&mut BTreeMap<String, Applicant>)) -> Result<(), StoreError> {
        let snap = Snapshot { version: self.version + 1, applicants: self.records.values().cloned().collect() };
        let bytes = serde_json::to_vec_pretty(&snap).expect("applicants always serialize");
        let no_fault = || Ok(());
        let hook: &dyn Fn() -> io::Result<()> = match &self.fault {
            Some(h) => h.as_ref(),
            None => &no_fault,
        };
        match atomic_write(&self.path, &bytes, hook) {
            Ok(()) => {
                self.version += 1;
                Ok(())
            }
            Err(e) => {
                rollback(&mut self.records);
                Err(e)
            }
        }
    }
}
