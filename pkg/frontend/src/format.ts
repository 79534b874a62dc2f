// Score display. The service prints scores as short decimal numbers, so
// rounding works on the decimal digits the wire actually carried rather
// than on binary approximations: 0.675 -> "0.68", 0.685 -> "0.68" (ties
// resolve half-to-even). Raw values stay available via title attributes.

/**
 * Round a score to two decimals, half-to-even, returning a fixed-width
 * string like "1.00" or "-0.42".
 */
export function formatScore(value: number): string {
  if (!Number.isFinite(value)) {
    return String(value);
  }
  const negative = value < 0;
  let text = Math.abs(value).toString();
  if (text.includes("e") || text.includes("E")) {
    // tiny magnitudes print in exponent form; scores live in [-1, 1]
    text = Math.abs(value).toFixed(12);
  }
  const dot = text.indexOf(".");
  const intPart = dot === -1 ? text : text.slice(0, dot);
  const fracPart = dot === -1 ? "" : text.slice(dot + 1);

  const padded = fracPart + "000";
  const tenths = padded.charCodeAt(0) - 48;
  const hundredths = padded.charCodeAt(1) - 48;
  const next = padded.charCodeAt(2) - 48;
  const rest = fracPart.slice(3).replace(/0+$/, "");

  let cents = tenths * 10 + hundredths;
  const roundUp =
    next > 5 ||
    (next === 5 && rest !== "") ||
    (next === 5 && rest === "" && cents % 2 === 1);
  if (roundUp) {
    cents += 1;
  }
  let whole = parseInt(intPart, 10);
  if (cents === 100) {
    cents = 0;
    whole += 1;
  }
  const sign = negative && (whole > 0 || cents > 0) ? "-" : "";
  return `${sign}${whole}.${cents.toString().padStart(2, "0")}`;
}
