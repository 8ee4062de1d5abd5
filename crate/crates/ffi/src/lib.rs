//! C interface to `onerel`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `_free` function. Fallible calls return an
//! [`OnerelStatus`] and leave a message for [`onerel_last_error`] on the
//! calling thread. Strings returned by the library are owned by the caller
//! and released with [`onerel_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use onerel::crash_simulator::{common_period, default_schedules, verify_at_least_two_crashes};
use onerel::klyachko_strata::lemma2_decompose;
use onerel::rational::int;
use onerel::sphere_complex::{generate_random, parse_complex, read_face_word, to_json, validate_sphere, SphereComplex};
use onerel::surjectivity_analyzer::{analyze_in, Reason, Status};
use onerel::word_algebra::{conjugacy_canonical, cyclic_reduce, exponent_sum, parse_word, Alphabet, Letter, MixedWord};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnerelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ContractViolation = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnerelSurjectivity {
    Surjective = 0,
    NotSurjective = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnerelReason {
    GtCollapse = 0,
    ExponentSum = 1,
    MainTheorem = 2,
    QuotientCertificate = 3,
}

/// A freely reduced word in `G * <t>` together with the rank of `G`.
pub struct OnerelWord {
    word: MixedWord,
    alphabet: Alphabet,
}

/// A labelled sphere complex.
pub struct OnerelComplex {
    complex: SphereComplex,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OnerelStatus, String);

impl Failure {
    fn input(e: impl ToString) -> Self {
        Failure(OnerelStatus::InvalidInput, e.to_string())
    }
}

/// Runs `body`, recording any failure or panic for [`onerel_last_error`].
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> OnerelStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OnerelStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OnerelStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OnerelStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(OnerelStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(OnerelStatus::NullPointer, format!("{what} is NULL")))
}

/// Checks `out` before building the value, so nothing leaks on NULL.
unsafe fn write_out<T>(out: *mut T, value: impl FnOnce() -> T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(OnerelStatus::NullPointer, format!("{what} is NULL")));
    }
    out.write(value());
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Smallest alphabet `a, b, ...` (skipping `t`) containing every generator of `w`.
fn covering_alphabet(w: &MixedWord) -> Alphabet {
    let highest = w
        .letters()
        .iter()
        .filter_map(|l| match l {
            Letter::Base(b) => Some(b.generator.symbol()),
            Letter::Stable { .. } => None,
        })
        .max();
    let rank = highest.map_or(1, |c| ('a'..=c).filter(|&x| x != 't').count());
    Alphabet::of_rank(rank).expect("generators are lowercase letters")
}

fn new_word(word: MixedWord, alphabet: Alphabet) -> *mut OnerelWord {
    Box::into_raw(Box::new(OnerelWord { word, alphabet }))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn onerel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn onerel_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn onerel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a word such as `"aTbt"` over the free group of rank `rank`; a rank
/// of 0 picks the smallest rank covering the word.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_parse(
    text: *const c_char,
    rank: usize,
    out: *mut *mut OnerelWord,
) -> OnerelStatus {
    guard(|| {
        let source = c_str(text, "text")?;
        let wide = Alphabet::of_rank(25).expect("25 generators exist");
        let word = parse_word(source, &wide).map_err(Failure::input)?;
        let alphabet =
            if rank == 0 { covering_alphabet(&word) } else { Alphabet::of_rank(rank).map_err(Failure::input)? };
        let word = parse_word(source, &alphabet).map_err(Failure::input)?;
        write_out(out, || new_word(word, alphabet), "out")
    })
}

/// # Safety
/// `word` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_free(word: *mut OnerelWord) {
    if !word.is_null() {
        drop(Box::from_raw(word));
    }
}

/// The reduced word as text, or NULL on failure.
///
/// # Safety
/// `word` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_to_string(word: *const OnerelWord) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        result = into_c_string(handle(word, "word")?.word.to_string());
        Ok(())
    });
    result
}

/// # Safety
/// `word` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_length(word: *const OnerelWord) -> usize {
    word.as_ref().map_or(0, |w| w.word.len())
}

/// # Safety
/// `word` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_exponent_sum(word: *const OnerelWord, out: *mut i64) -> OnerelStatus {
    guard(|| {
        let w = handle(word, "word")?;
        write_out(out, || exponent_sum(&w.word), "out")
    })
}

/// A cyclically reduced conjugate of `word` as a new handle.
///
/// # Safety
/// `word` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_cyclic_reduce(word: *const OnerelWord, out: *mut *mut OnerelWord) -> OnerelStatus {
    guard(|| {
        let w = handle(word, "word")?;
        write_out(out, || new_word(cyclic_reduce(&w.word).reduced, w.alphabet.clone()), "out")
    })
}

/// The canonical representative of the conjugacy class of `word`.
///
/// # Safety
/// `word` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_word_conjugacy_canonical(
    word: *const OnerelWord,
    out: *mut *mut OnerelWord,
) -> OnerelStatus {
    guard(|| {
        let w = handle(word, "word")?;
        write_out(out, || new_word(conjugacy_canonical(&w.word), w.alphabet.clone()), "out")
    })
}

/// Surjectivity of `G -> G * <t> / <<word>>`.
///
/// # Safety
/// `word` must be a live handle; `status` and `reason` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn onerel_analyze(
    word: *const OnerelWord,
    status: *mut OnerelSurjectivity,
    reason: *mut OnerelReason,
) -> OnerelStatus {
    guard(|| {
        let w = handle(word, "word")?;
        let verdict = analyze_in(&w.word, &w.alphabet).map_err(Failure::input)?;
        let s = match verdict.status {
            Status::Surjective => OnerelSurjectivity::Surjective,
            Status::NotSurjective => OnerelSurjectivity::NotSurjective,
            Status::Undetermined => OnerelSurjectivity::Undetermined,
        };
        let r = match verdict.reason {
            Reason::GtCollapse => OnerelReason::GtCollapse,
            Reason::ExponentSum => OnerelReason::ExponentSum,
            Reason::MainTheorem => OnerelReason::MainTheorem,
            Reason::QuotientCertificate => OnerelReason::QuotientCertificate,
        };
        write_out(status, || s, "status")?;
        write_out(reason, || r, "reason")
    })
}

/// The full verdict with its evidence as JSON, or NULL on failure.
///
/// # Safety
/// `word` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onerel_analyze_json(word: *const OnerelWord) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let w = handle(word, "word")?;
        let verdict = analyze_in(&w.word, &w.alphabet).map_err(Failure::input)?;
        result = into_c_string(serde_json::to_string(&verdict).expect("plain data"));
        Ok(())
    });
    result
}

/// Block decomposition of an exponent-one word as JSON, or NULL on failure.
///
/// # Safety
/// `word` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onerel_decompose_json(word: *const OnerelWord) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let w = handle(word, "word")?;
        let d = lemma2_decompose(&w.word).map_err(Failure::input)?;
        if !d.verify(&w.word) {
            return Err(Failure(
                OnerelStatus::ContractViolation,
                format!("decomposition of {} failed its checks", w.word),
            ));
        }
        result = into_c_string(serde_json::to_string(&d).expect("plain data"));
        Ok(())
    });
    result
}

/// Parses and validates a complex in the JSON file format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_from_json(json: *const c_char, out: *mut *mut OnerelComplex) -> OnerelStatus {
    guard(|| {
        let complex = parse_complex(c_str(json, "json")?).map_err(Failure::input)?;
        let report = validate_sphere(&complex).map_err(Failure::input)?;
        if !report.passed() {
            return Err(Failure::input(format!("not a sphere subdivision: {}", report.problems.join("; "))));
        }
        write_out(out, || Box::into_raw(Box::new(OnerelComplex { complex })), "out")
    })
}

/// A seeded random sphere complex with roughly `size` vertices.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_generate(seed: u64, size: usize, out: *mut *mut OnerelComplex) -> OnerelStatus {
    guard(|| write_out(out, || Box::into_raw(Box::new(OnerelComplex { complex: generate_random(seed, size) })), "out"))
}

/// # Safety
/// `complex` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_free(complex: *mut OnerelComplex) {
    if !complex.is_null() {
        drop(Box::from_raw(complex));
    }
}

/// # Safety
/// `complex` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_to_json(complex: *const OnerelComplex) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        result = into_c_string(to_json(&handle(complex, "complex")?.complex));
        Ok(())
    });
    result
}

/// The word read around `face` starting at corner `start`.
///
/// # Safety
/// `complex` must be a live handle, `face` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_read_face(
    complex: *const OnerelComplex,
    face: *const c_char,
    start: usize,
    out: *mut *mut OnerelWord,
) -> OnerelStatus {
    guard(|| {
        let c = handle(complex, "complex")?;
        let word = read_face_word(&c.complex, c_str(face, "face")?, start).map_err(Failure::input)?;
        let alphabet = covering_alphabet(&word);
        write_out(out, || new_word(word, alphabet), "out")
    })
}

/// Runs the default car flow for two common periods and reports whether at
/// least two complete crashes happen within one period.
///
/// # Safety
/// `complex` must be a live handle; `at_least_two` and `complete` valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn onerel_complex_verify_crashes(
    complex: *const OnerelComplex,
    seed: u64,
    at_least_two: *mut bool,
    complete: *mut usize,
) -> OnerelStatus {
    guard(|| {
        let c = &handle(complex, "complex")?.complex;
        let schedules = default_schedules(c, seed).map_err(Failure::input)?;
        let horizon = common_period(&schedules) * int(2);
        let check = verify_at_least_two_crashes(c, &schedules, &horizon)
            .map_err(|e| Failure(OnerelStatus::ContractViolation, e.to_string()))?;
        write_out(at_least_two, || check.at_least_two, "at_least_two")?;
        write_out(complete, || check.complete_in_period, "complete")
    })
}
