use std::io::Write;

use crate::error::{Error, Result};

/// Binary PPM (P6), 8-bit RGB, rows from the top.
pub fn write_ppm<W: Write>(out: &mut W, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    if rgb.len() != 3 * width * height {
        return Err(Error::InputDomain(format!(
            "{} bytes for a {width}x{height} image",
            rgb.len()
        )));
    }
    write!(out, "P6\n{width} {height}\n255\n")?;
    out.write_all(rgb)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_payload() {
        let mut buf = Vec::new();
        write_ppm(&mut buf, 2, 1, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(&buf[..11], b"P6\n2 1\n255\n");
        assert_eq!(&buf[11..], &[1, 2, 3, 4, 5, 6]);
        assert!(write_ppm(&mut buf, 2, 2, &[0; 3]).is_err());
    }
}
