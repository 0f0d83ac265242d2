/** Small DOM construction helpers; no framework, no globals.

All builders derive the document from a supplied element so pages work
in any DOM implementation (the browser or a test-provided window).
*/

export interface ElOptions {
  className?: string;
  text?: string;
  attrs?: Record<string, string>;
  children?: HTMLElement[];
  onClick?: (event: MouseEvent) => void;
}

export function el(
  doc: Document,
  tag: string,
  options: ElOptions = {},
): HTMLElement {
  const node = doc.createElement(tag);
  if (options.className) node.className = options.className;
  if (options.text !== undefined) node.textContent = options.text;
  for (const [name, value] of Object.entries(options.attrs ?? {})) {
    node.setAttribute(name, value);
  }
  for (const child of options.children ?? []) {
    node.appendChild(child);
  }
  if (options.onClick) node.addEventListener("click", options.onClick);
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

export function docOf(node: HTMLElement): Document {
  return node.ownerDocument;
}
