//! JSON file formats and the `name:params | file.json` argument convention.
//!
//! * spectrum: `{"classes": [{"value": 0.5, "mult": 2}]}`
//! * state: `{"dA": 2, "dB": 2, "amps_re": [...], "amps_im": [...]}`, row-major, `B` fastest
//! * channel: `{"kraus_re": [[[..]]], "kraus_im": [[[..]]]}`, one `d_out x d_in` matrix per operator
//! * gate: `{"dA": 2, "dB": 2, "re": [[..]], "im": [[..]]}`
//! * program: `{"input": [..], "branches": [[step, ..], ..], "amplitudes_re": [..], "amplitudes_im": [..]}`
//!   with steps tagged by `"op"`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use entspread_core::capacity::{BipartiteUnitary, QuantumChannel};
use entspread_core::linalg::CMatrix;
use entspread_core::protocols::{Action, Holder, Initial, Step};
use entspread_core::spectra::schmidt_spectrum_of;
use entspread_core::states::{spectrum_of_named, NamedState};
use entspread_core::{BipartiteState, Complex64, SchmidtSpectrum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub classes: Vec<ClassEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassEntry {
    pub value: f64,
    pub mult: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub amps_re: Vec<f64>,
    #[serde(default)]
    pub amps_im: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kraus_re: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub kraus_im: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GateFile {
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum HolderName {
    Alice,
    Bob,
}

impl From<HolderName> for Holder {
    fn from(h: HolderName) -> Self {
        match h {
            HolderName::Alice => Holder::Alice,
            HolderName::Bob => Holder::Bob,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputEntry {
    /// A named state (`"phi"` or any named state such as `partial:0.25`)
    /// shared as `{label}_A`, `{label}_B`.
    Shared { label: String, shared: String },
    Local { label: String, holder: HolderName, re: Vec<f64>, #[serde(default)] im: Option<Vec<f64>> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepEntry {
    LocalUnitary { holder: HolderName, registers: Vec<String>, re: Vec<Vec<f64>>, #[serde(default)] im: Option<Vec<Vec<f64>>> },
    AddAncilla { holder: HolderName, dim: usize, label: String },
    Discard { register: String },
    SendQubit { register: String },
    SendCbit { register: String },
    Leak { register: String },
    DestroyEbitViaCbit,
    NoopRandomBit,
    PreparePartialViaCbit { p: f64 },
    PreparePartialViaQubit { p: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProgramFile {
    #[serde(default)]
    pub input: Vec<InputEntry>,
    pub branches: Vec<Vec<StepEntry>>,
    pub amplitudes_re: Vec<f64>,
    #[serde(default)]
    pub amplitudes_im: Option<Vec<f64>>,
}

pub struct Program {
    pub input: Vec<Initial>,
    pub branches: Vec<Vec<Step>>,
    pub amplitudes: Vec<Complex64>,
}

fn complex_vec(re: &[f64], im: Option<&[f64]>) -> Result<Vec<Complex64>> {
    match im {
        Some(im) if im.len() != re.len() => bail!("real and imaginary parts differ in length ({} vs {})", re.len(), im.len()),
        Some(im) => Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()),
        None => Ok(re.iter().map(|&a| Complex64::new(a, 0.0)).collect()),
    }
}

fn complex_matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<CMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        bail!("matrix rows have unequal lengths");
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            bail!("imaginary part does not match the shape of the real part");
        }
    }
    let flat_re: Vec<f64> = re.concat();
    let flat_im: Option<Vec<f64>> = im.map(|m| m.concat());
    Ok(CMatrix::from_vec(rows, cols, complex_vec(&flat_re, flat_im.as_deref())?)?)
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

fn is_file_arg(arg: &str) -> bool {
    arg.ends_with(".json")
}

impl SpectrumFile {
    pub fn to_spectrum(&self) -> Result<SchmidtSpectrum> {
        Ok(SchmidtSpectrum::from_classes(self.classes.iter().map(|c| (c.value, c.mult)))?)
    }

    pub fn from_spectrum(spec: &SchmidtSpectrum) -> Result<Self> {
        let classes = spec
            .classes()
            .iter()
            .map(|c| {
                let mult = u64::try_from(c.multiplicity()).map_err(|_| anyhow::anyhow!("multiplicity does not fit the file format"))?;
                Ok(ClassEntry { value: c.value(), mult })
            })
            .collect::<Result<_>>()?;
        Ok(Self { classes })
    }
}

impl StateFile {
    pub fn to_state(&self) -> Result<BipartiteState> {
        if self.amps_re.len() != self.da * self.db {
            bail!("state needs dA*dB = {} amplitudes, got {}", self.da * self.db, self.amps_re.len());
        }
        let amps = complex_vec(&self.amps_re, self.amps_im.as_deref())?;
        Ok(BipartiteState::new(CMatrix::from_vec(self.da, self.db, amps)?)?)
    }
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        if let Some(im) = &self.kraus_im {
            if im.len() != self.kraus_re.len() {
                bail!("kraus_re and kraus_im list different numbers of operators");
            }
        }
        let kraus = self
            .kraus_re
            .iter()
            .enumerate()
            .map(|(i, re)| complex_matrix(re, self.kraus_im.as_ref().map(|im| im[i].as_slice())))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantumChannel::new(kraus)?)
    }
}

impl GateFile {
    pub fn to_gate(&self) -> Result<BipartiteUnitary> {
        let m = complex_matrix(&self.re, self.im.as_deref())?;
        Ok(BipartiteUnitary::new(m, self.da, self.db)?)
    }
}

impl StepEntry {
    pub fn to_step(&self) -> Result<Step> {
        Ok(match self {
            StepEntry::LocalUnitary { holder, registers, re, im } => Step::Act(Action::LocalUnitary {
                holder: (*holder).into(),
                registers: registers.clone(),
                matrix: complex_matrix(re, im.as_deref())?,
            }),
            StepEntry::AddAncilla { holder, dim, label } => {
                Step::Act(Action::AddAncilla { holder: (*holder).into(), dim: *dim, label: label.clone() })
            }
            StepEntry::Discard { register } => Step::Act(Action::Discard { register: register.clone() }),
            StepEntry::SendQubit { register } => Step::Act(Action::SendQubit { register: register.clone() }),
            StepEntry::SendCbit { register } => Step::Act(Action::SendCbit { register: register.clone() }),
            StepEntry::Leak { register } => Step::Act(Action::Leak { register: register.clone() }),
            StepEntry::DestroyEbitViaCbit => Step::DestroyEbitViaCbit,
            StepEntry::NoopRandomBit => Step::NoopRandomBit,
            StepEntry::PreparePartialViaCbit { p } => Step::PreparePartialViaCbit(*p),
            StepEntry::PreparePartialViaQubit { p } => Step::PreparePartialViaQubit(*p),
        })
    }
}

/// Largest Schmidt rank materialized for a shared input register.
const MAX_SHARED_RANK: usize = 64;

impl InputEntry {
    pub fn to_initial(&self) -> Result<Initial> {
        match self {
            InputEntry::Shared { label, shared } if shared == "phi" => Ok(Initial::phi(label)),
            InputEntry::Shared { label, shared } => {
                let named: NamedState = shared.parse()?;
                Ok(Initial::from_spectrum(label, &spectrum_of_named(named)?, MAX_SHARED_RANK)?)
            }
            InputEntry::Local { label, holder, re, im } => {
                Ok(Initial::Local { label: label.clone(), holder: (*holder).into(), amplitudes: complex_vec(re, im.as_deref())? })
            }
        }
    }
}

impl ProgramFile {
    pub fn to_program(&self) -> Result<Program> {
        Ok(Program {
            input: self.input.iter().map(InputEntry::to_initial).collect::<Result<_>>()?,
            branches: self
                .branches
                .iter()
                .map(|b| b.iter().map(StepEntry::to_step).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
            amplitudes: complex_vec(&self.amplitudes_re, self.amplitudes_im.as_deref())?,
        })
    }
}

/// A named state, a spectrum file or a state file.
pub fn load_spectrum(arg: &str) -> Result<SchmidtSpectrum> {
    if !is_file_arg(arg) {
        let named: NamedState = arg.parse()?;
        return Ok(spectrum_of_named(named)?);
    }
    let value = read_json(Path::new(arg))?;
    if value.get("classes").is_some() {
        let f: SpectrumFile = serde_json::from_value(value).with_context(|| format!("{arg}: malformed spectrum file"))?;
        f.to_spectrum()
    } else {
        let f: StateFile = serde_json::from_value(value).with_context(|| format!("{arg}: malformed state file"))?;
        Ok(schmidt_spectrum_of(&f.to_state()?)?)
    }
}

/// A channel preset or a Kraus file.
pub fn load_channel(arg: &str) -> Result<QuantumChannel> {
    if !is_file_arg(arg) {
        return Ok(arg.parse()?);
    }
    let f: ChannelFile = serde_json::from_value(read_json(Path::new(arg))?).with_context(|| format!("{arg}: malformed channel file"))?;
    f.to_channel()
}

/// A gate preset or a matrix file.
pub fn load_gate(arg: &str) -> Result<BipartiteUnitary> {
    if !is_file_arg(arg) {
        return Ok(arg.parse()?);
    }
    let f: GateFile = serde_json::from_value(read_json(Path::new(arg))?).with_context(|| format!("{arg}: malformed gate file"))?;
    f.to_gate()
}

pub fn load_program(path: &str) -> Result<Program> {
    let f: ProgramFile = serde_json::from_value(read_json(Path::new(path))?).with_context(|| format!("{path}: malformed program file"))?;
    f.to_program()
}
