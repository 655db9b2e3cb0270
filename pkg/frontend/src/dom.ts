/** Tiny DOM construction helpers over an injected Document, so view code
 * renders identically in the browser and under the test stub. */

export interface MinimalElement {
  textContent: string | null;
  className: string;
  appendChild(child: MinimalElement): unknown;
  setAttribute(name: string, value: string): void;
  addEventListener?(type: string, handler: (ev?: unknown) => void): void;
  children?: unknown;
}

export interface MinimalDocument {
  createElement(tag: string): MinimalElement;
}

export function el(
  doc: MinimalDocument,
  tag: string,
  attrs: Record<string, string> = {},
  children: (MinimalElement | string)[] = [],
): MinimalElement {
  const node = doc.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") {
      node.className = v;
    } else {
      node.setAttribute(k, v);
    }
  }
  for (const child of children) {
    if (typeof child === "string") {
      const span = doc.createElement("span");
      span.textContent = child;
      node.appendChild(span);
    } else {
      node.appendChild(child);
    }
  }
  return node;
}

export function textCell(
  doc: MinimalDocument,
  tag: string,
  text: string,
): MinimalElement {
  const node = doc.createElement(tag);
  node.textContent = text;
  return node;
}
