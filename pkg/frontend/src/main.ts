/** Browser entry point: annotator id from ?annotator= or a prompt. */

import { createApp } from './app.js';

const params = new URLSearchParams(window.location.search);
const annotator = params.get('annotator') || window.prompt('Annotator id?') || 'anonymous';
const root = document.getElementById('app');
if (root) {
  createApp(root, { annotator });
}
