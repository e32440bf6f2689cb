#pragma once

// Tokenizer shared by the spec, facts, update and goal languages.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace viewlens::frontend {

/// 1-based position of a token in its source; length is at least 1.
struct SourceSpan {
  std::string file;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;

  std::string str() const {
    return (file.empty() ? std::string("<input>") : file) + ":" +
           std::to_string(line) + ":" + std::to_string(column);
  }
};

struct Diagnostic {
  SourceSpan span;
  std::string code;
  std::string message;

  std::string str() const { return span.str() + ": " + code + ": " + message; }
};

enum class Tok {
  ident,    // letters, digits, '_' and '\'' after a letter or '_'
  number,   // digit-leading token
  string,   // "..." with \" and \\ escapes; text holds the unescaped value
  lparen, rparen, lbrace, rbrace,
  comma, dot, slash, colon, semicolon,
  implies,  // :-
  arrow,    // ->
  eq, neq, at,
  end,
  error,
};

inline const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::string: return "string";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::slash: return "'/'";
    case Tok::colon: return "':'";
    case Tok::semicolon: return "';'";
    case Tok::implies: return "':-'";
    case Tok::arrow: return "'->'";
    case Tok::eq: return "'='";
    case Tok::neq: return "'!='";
    case Tok::at: return "'@'";
    case Tok::end: return "end of input";
    case Tok::error: return "invalid token";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceSpan span;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

/// Splits `src` into tokens. Lexical errors become Tok::error tokens whose
/// text is the message; the stream always ends with Tok::end.
inline std::vector<Token> tokenize(std::string_view src, const std::string& file = {}) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::string text, std::size_t l, std::size_t c,
                  std::size_t len) {
    out.push_back(Token{kind, std::move(text), SourceSpan{file, l, c, len ? len : 1}});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    std::size_t l = line, cl = col, start = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      push(Tok::ident, std::string(src.substr(i, j - i)), l, cl, j - i);
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      push(Tok::number, std::string(src.substr(i, j - i)), l, cl, j - i);
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size() && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size() && (src[j + 1] == '"' || src[j + 1] == '\\')) {
          value += src[j + 1];
          j += 2;
          continue;
        }
        if (src[j] == '"') {
          closed = true;
          ++j;
          break;
        }
        value += src[j++];
      }
      if (!closed) {
        push(Tok::error, "unterminated string", l, cl, j - start);
      } else if (value.empty()) {
        push(Tok::error, "empty constant", l, cl, j - start);
      } else {
        push(Tok::string, std::move(value), l, cl, j - start);
      }
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    Tok kind = Tok::error;
    std::size_t len = 1;
    if (two(':', '-')) kind = Tok::implies, len = 2;
    else if (two('-', '>')) kind = Tok::arrow, len = 2;
    else if (two('!', '=')) kind = Tok::neq, len = 2;
    else {
      switch (c) {
        case '(': kind = Tok::lparen; break;
        case ')': kind = Tok::rparen; break;
        case '{': kind = Tok::lbrace; break;
        case '}': kind = Tok::rbrace; break;
        case ',': kind = Tok::comma; break;
        case '.': kind = Tok::dot; break;
        case '/': kind = Tok::slash; break;
        case ':': kind = Tok::colon; break;
        case ';': kind = Tok::semicolon; break;
        case '=': kind = Tok::eq; break;
        case '@': kind = Tok::at; break;
        default: break;
      }
    }
    if (kind == Tok::error) {
      push(Tok::error, std::string("unexpected character '") + c + "'", l, cl, 1);
    } else {
      push(kind, std::string(src.substr(i, len)), l, cl, len);
    }
    advance(len);
  }
  push(Tok::end, "", line, col, 1);
  return out;
}

}  // namespace viewlens::frontend
