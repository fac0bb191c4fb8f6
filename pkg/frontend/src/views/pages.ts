/**
 * Static gallery and about pages. The gallery lists the service's bundled
 * examples with thumbnails; clicking one loads its spec into the editor.
 */

import type { GalleryEntry } from '../api.js';

export function renderGallery(
  container: HTMLElement,
  baseUrl: string,
  entries: GalleryEntry[],
  onOpen: (entry: GalleryEntry) => void,
): void {
  if (entries.length === 0) {
    container.innerHTML = '<p class="empty">No examples available right now.</p>';
    return;
  }
  container.innerHTML = '';
  for (const entry of entries) {
    const card = document.createElement('figure');
    card.className = 'gallery-card';
    const img = document.createElement('img');
    img.src = `${baseUrl}/gallery/${entry.name}.svg`;
    img.alt = entry.title;
    const caption = document.createElement('figcaption');
    caption.textContent = entry.title;
    card.append(img, caption);
    card.addEventListener('click', () => onOpen(entry));
    container.appendChild(card);
  }
}

export const ABOUT_HTML = `
  <h2>About</h2>
  <p>This studio builds geo-infographics from four ingredients: a base map,
  one or two encoding channels, a label strategy, and optional highlights.</p>
  <ol>
    <li>Upload a JSON table of per-region values (or origin/destination flows).</li>
    <li>Pick components from the left panel; the canvas updates live.</li>
    <li>If two channels cannot be combined, an alert explains why and offers
        working alternatives.</li>
    <li>Export the result as an SVG file once the preview is valid.</li>
  </ol>
  <p>All rendering and design verdicts come from the render service; what you
  export is byte-for-byte what the service produced.</p>`;
