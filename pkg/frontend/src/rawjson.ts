// Maps JSON paths to the exact number literals in a JSON document.
//
// The service serializes floats with Python's repr ("1.955e-05"), and any
// parse/re-format cycle in the browser would change that text
// (String(1.955e-5) is "0.00001955"). The parameter table must show the
// numbers exactly as the service wrote them, so this scanner walks the raw
// response text and records each number's source substring.
//
// Paths join object keys and array indices with '.', e.g.
// "motor.thrust_coeffs_n.0.2". Report keys never contain dots, so the
// joined form is unambiguous here.

const NUMBER = /-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/y;
const WS = /[ \t\n\r]*/y;

function skipWs(text: string, i: number): number {
  WS.lastIndex = i;
  WS.exec(text);
  return WS.lastIndex;
}

function fail(i: number): never {
  throw new SyntaxError(`unexpected JSON at offset ${i}`);
}

/** Returns [decoded string, index after the closing quote]. */
function scanString(text: string, i: number): [string, number] {
  if (text[i] !== '"') fail(i);
  let j = i + 1;
  while (j < text.length) {
    const c = text[j];
    if (c === '\\') j += 2;
    else if (c === '"') return [JSON.parse(text.slice(i, j + 1)) as string, j + 1];
    else j += 1;
  }
  fail(i);
}

function scanValue(text: string, i: number, path: string, out: Map<string, string>): number {
  const c = text[i];
  if (c === '{') {
    i = skipWs(text, i + 1);
    if (text[i] === '}') return i + 1;
    for (;;) {
      const [key, afterKey] = scanString(text, i);
      i = skipWs(text, afterKey);
      if (text[i] !== ':') fail(i);
      i = scanValue(text, skipWs(text, i + 1), path ? `${path}.${key}` : key, out);
      i = skipWs(text, i);
      if (text[i] === ',') i = skipWs(text, i + 1);
      else if (text[i] === '}') return i + 1;
      else fail(i);
    }
  }
  if (c === '[') {
    i = skipWs(text, i + 1);
    if (text[i] === ']') return i + 1;
    for (let k = 0; ; k++) {
      i = scanValue(text, i, path ? `${path}.${k}` : String(k), out);
      i = skipWs(text, i);
      if (text[i] === ',') i = skipWs(text, i + 1);
      else if (text[i] === ']') return i + 1;
      else fail(i);
    }
  }
  if (c === '"') return scanString(text, i)[1];
  if (text.startsWith('true', i)) return i + 4;
  if (text.startsWith('false', i)) return i + 5;
  if (text.startsWith('null', i)) return i + 4;
  NUMBER.lastIndex = i;
  const m = NUMBER.exec(text);
  if (!m || m[0].length === 0) fail(i);
  out.set(path, m[0]);
  return i + m[0].length;
}

export function numberLiterals(text: string): Map<string, string> {
  const out = new Map<string, string>();
  const end = scanValue(text, skipWs(text, 0), '', out);
  if (skipWs(text, end) !== text.length) fail(end);
  return out;
}
