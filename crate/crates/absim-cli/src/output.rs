//! Deterministic serialization: JSON with 17 significant digits on every
//! float (so byte-identical reports are a meaningful reproducibility
//! check), and the fixed-column CSV series format.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use absim::scenario::SeriesSample;

/// Pretty JSON formatter that prints every finite f64 as `{:.16e}`
/// (17 significant digits), enough to round-trip the value exactly.
struct SciFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> Formatter for SciFormatter<'a> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{:.16e}", value)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serialize any value to the deterministic JSON form (trailing newline
/// included).
pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(
        &mut buf,
        SciFormatter { inner: PrettyFormatter::new() },
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

pub const SERIES_HEADER: &str =
    "t,re_overlap,im_overlap,visibility,rel_phase,entropy,mean_x_L,mean_x_R,mean_p_L,mean_p_R";

/// Render the time series in the fixed column order, 17 significant digits.
pub fn series_to_csv(series: &[SeriesSample]) -> String {
    let mut out = String::with_capacity(series.len() * 200 + 128);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for s in series {
        let row = [
            s.t,
            s.re_overlap,
            s.im_overlap,
            s.visibility,
            s.rel_phase,
            s.entropy,
            s.mean_x_l,
            s.mean_x_r,
            s.mean_p_l,
            s.mean_p_r,
        ];
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", v));
            first = false;
        }
        out.push('\n');
    }
    out
}
