/** Escape a value for use inside a double-quoted attribute selector. */
export function attrValue(value: string): string {
  return value.replace(/\\/g, "\\\\").replace(/"/g, '\\"');
}
